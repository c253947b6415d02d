//! Exact Laurent polynomials on a quarter-exponent grid, the bracket
//! calculus, rational functions and identity testing.

pub mod bracket;
pub mod field;
pub mod json;
mod kernel;
pub mod pit;
pub mod poly;
pub mod ratfunc;
pub mod sum;
pub mod vars;

pub use bracket::{bracket_class, bracket_monomial, Brackets, FactoredRat};
pub use field::{Field, Fp, PRIME};
pub use pit::CompareMode;
pub use poly::LaurentPoly;
pub use ratfunc::{rat_equal, RatFunc};
pub use sum::BracketSum;
pub use vars::{Monomial, VarGroup, VarSet, Vars, GRID};
