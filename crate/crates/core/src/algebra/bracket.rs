//! The bracket `[m] = m^(1/2) - m^(-1/2)` and products of brackets.
//!
//! A class `V = sum c_m m` with integer coefficients is sent to the product
//! `prod [m]^(c_m)`. Since `[m^-1] = -[m]`, every factor can be stored in one
//! orientation (first nonzero exponent positive) with the sign collected in
//! front. That gives [`FactoredRat`] a canonical form which hashes and
//! compares structurally.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use super::poly::{eval_monomial, substitute_monomial, LaurentPoly};
use super::ratfunc::RatFunc;
use super::vars::{Monomial, Vars};
use crate::error::{Error, Result};

/// `m^(1/2) - m^(-1/2)`; zero exactly when `m` is trivial.
pub fn bracket_monomial(vars: &Vars, m: &Monomial) -> Result<LaurentPoly> {
    let h = m.sqrt()?;
    let mut p = LaurentPoly::monomial(vars, h.clone());
    p.add_term(h.inv(), -BigRational::one());
    Ok(p)
}

/// Value of `[m]` at a point given by quarter-root values.
pub fn eval_bracket<F: super::field::Field>(m: &Monomial, point: &[F]) -> Result<F> {
    let h = eval_monomial(&m.sqrt()?, point)?;
    Ok(h.sub(&h.inv()?))
}

/// Multiset of canonically oriented bracket factors with nonzero integer
/// multiplicities. Negative multiplicity means the factor divides.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Brackets(BTreeMap<Monomial, i32>);

/// Result of multiplying a bracket into a [`Brackets`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Push {
    /// Product unchanged up to this sign.
    Sign(i8),
    /// A trivial bracket landed in the numerator.
    Zero,
}

impl Brackets {
    pub fn new() -> Self {
        Brackets(BTreeMap::new())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, i32)> {
        self.0.iter().map(|(m, k)| (m, *k))
    }

    pub fn multiplicity(&self, m: &Monomial) -> i32 {
        self.0.get(m).copied().unwrap_or(0)
    }

    /// Multiplies by `[m]^mult`, reorienting `m` if needed.
    pub fn push(&mut self, m: &Monomial, mult: i32) -> Result<Push> {
        if mult == 0 {
            return Ok(Push::Sign(1));
        }
        if m.is_one() {
            return if mult > 0 {
                Ok(Push::Zero)
            } else {
                Err(Error::DivisionByTrivialBracket)
            };
        }
        m.sqrt()?;
        let (c, flipped) = m.canonical();
        let sign = if flipped && mult % 2 != 0 { -1 } else { 1 };
        let e = self.0.entry(c.clone()).or_insert(0);
        *e += mult;
        if *e == 0 {
            self.0.remove(&c);
        }
        Ok(Push::Sign(sign))
    }

    /// Product of two multisets; bracket keys are already canonical, so no
    /// sign can arise.
    pub fn mul(&self, other: &Brackets) -> Brackets {
        let mut out = self.0.clone();
        for (m, k) in &other.0 {
            let e = out.entry(m.clone()).or_insert(0);
            *e += k;
            if *e == 0 {
                out.remove(m);
            }
        }
        Brackets(out)
    }

    pub fn inv(&self) -> Brackets {
        Brackets(self.0.iter().map(|(m, k)| (m.clone(), -k)).collect())
    }

    /// `[m] -> [m^k]`; orientation is preserved by positive powers.
    pub fn adams(&self, k: u32) -> Brackets {
        let mut out = BTreeMap::new();
        for (m, mult) in &self.0 {
            *out.entry(m.pow(k as i32)).or_insert(0) += mult;
        }
        out.retain(|_, v| *v != 0);
        Brackets(out)
    }

    /// Positive and negative parts as separate multisets with positive
    /// multiplicities.
    pub fn split(&self) -> (Vec<(&Monomial, u32)>, Vec<(&Monomial, u32)>) {
        let mut num = Vec::new();
        let mut den = Vec::new();
        for (m, &k) in &self.0 {
            if k > 0 {
                num.push((m, k as u32));
            } else {
                den.push((m, (-k) as u32));
            }
        }
        (num, den)
    }

    pub fn eval<F: super::field::Field>(&self, point: &[F]) -> Result<F> {
        let mut num = F::one();
        let mut den = F::one();
        for (m, &k) in &self.0 {
            let b = eval_bracket(m, point)?;
            if k > 0 {
                num = num.mul(&b.pow(k as u64));
            } else {
                den = den.mul(&b.pow((-k) as u64));
            }
        }
        Ok(num.mul(&den.inv()?))
    }

    pub fn degree_bound(&self) -> u64 {
        self.0
            .iter()
            .map(|(m, k)| m.degree_bound() * k.unsigned_abs() as u64)
            .sum()
    }

    pub fn keys(&self) -> impl Iterator<Item = &Monomial> {
        self.0.keys()
    }
}

impl fmt::Debug for Brackets {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.0.iter()).finish()
    }
}

/// `sign * unit * prod [m]^mult`, or zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FactoredRat {
    vars: Vars,
    zero: bool,
    sign: i8,
    unit: Monomial,
    factors: Brackets,
}

impl FactoredRat {
    pub fn one(vars: &Vars) -> Self {
        FactoredRat {
            vars: vars.clone(),
            zero: false,
            sign: 1,
            unit: vars.one(),
            factors: Brackets::new(),
        }
    }

    pub fn zero(vars: &Vars) -> Self {
        FactoredRat {
            zero: true,
            ..FactoredRat::one(vars)
        }
    }

    pub fn from_parts(vars: &Vars, sign: i8, unit: Monomial, factors: Brackets) -> Self {
        assert!(sign == 1 || sign == -1);
        FactoredRat {
            vars: vars.clone(),
            zero: false,
            sign,
            unit,
            factors,
        }
    }

    /// A product of brackets given as `(monomial, multiplicity)` pairs in any
    /// orientation.
    pub fn from_brackets<'a, I>(vars: &Vars, factors: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a Monomial, i32)>,
    {
        let mut f = FactoredRat::one(vars);
        for (m, k) in factors {
            f.push(m, k)?;
        }
        if f.zero {
            return Ok(FactoredRat::zero(vars));
        }
        Ok(f)
    }

    fn push(&mut self, m: &Monomial, mult: i32) -> Result<()> {
        if m.arity() != self.vars.len() {
            return Err(Error::ArityMismatch("bracket monomial".into()));
        }
        match self.factors.push(m, mult)? {
            Push::Zero => self.zero = true,
            Push::Sign(s) => self.sign *= s,
        }
        Ok(())
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn unit(&self) -> &Monomial {
        &self.unit
    }

    pub fn factors(&self) -> &Brackets {
        &self.factors
    }

    pub fn negate(&self) -> Self {
        FactoredRat {
            sign: -self.sign,
            ..self.clone()
        }
    }

    pub fn mul(&self, other: &FactoredRat) -> Result<FactoredRat> {
        self.vars.check(&other.vars)?;
        if self.zero || other.zero {
            return Ok(FactoredRat::zero(&self.vars));
        }
        Ok(FactoredRat {
            vars: self.vars.clone(),
            zero: false,
            sign: self.sign * other.sign,
            unit: self.unit.mul(&other.unit),
            factors: self.factors.mul(&other.factors),
        })
    }

    pub fn inv(&self) -> Result<FactoredRat> {
        if self.zero {
            return Err(Error::DenominatorVanishes);
        }
        Ok(FactoredRat {
            unit: self.unit.inv(),
            factors: self.factors.inv(),
            ..self.clone()
        })
    }

    /// The prefactor `sign * unit` as a polynomial (zero if `is_zero`).
    pub fn prefactor(&self) -> LaurentPoly {
        if self.zero {
            return LaurentPoly::zero(&self.vars);
        }
        LaurentPoly::term(
            &self.vars,
            self.unit.clone(),
            BigRational::from_integer(self.sign.into()),
        )
    }

    /// Numerator and denominator products; identical factors have already
    /// cancelled in the multiset.
    pub fn expand(&self) -> RatFunc {
        if self.zero {
            return RatFunc::zero(&self.vars);
        }
        let (num, den) = self.factors.split();
        let mut n = self.prefactor();
        for (m, k) in num {
            let b = bracket_monomial(&self.vars, m).expect("grid checked on insertion");
            n = &n * &b.pow(k);
        }
        let mut d = LaurentPoly::one(&self.vars);
        for (m, k) in den {
            let b = bracket_monomial(&self.vars, m).expect("grid checked on insertion");
            d = &d * &b.pow(k);
        }
        RatFunc::new(n, d).expect("bracket products are nonzero")
    }

    pub fn adams(&self, k: u32) -> FactoredRat {
        FactoredRat {
            unit: self.unit.pow(k as i32),
            factors: self.factors.adams(k),
            ..self.clone()
        }
    }

    /// Monomial substitution. A factor that becomes trivial zeroes the
    /// product from the numerator and is an error in the denominator.
    pub fn substitute(&self, target: &Vars, images: &[Monomial]) -> Result<FactoredRat> {
        let mut out = FactoredRat::one(target);
        if self.zero {
            out.zero = true;
            return Ok(out);
        }
        out.sign = self.sign;
        out.unit = substitute_monomial(&self.unit, target, images)?;
        // Denominators first so a 0/0 is always reported.
        let (num, den) = self.factors.split();
        for (m, k) in den {
            out.push(&substitute_monomial(m, target, images)?, -(k as i32))?;
        }
        for (m, k) in num {
            out.push(&substitute_monomial(m, target, images)?, k as i32)?;
        }
        if out.zero {
            return Ok(FactoredRat::zero(target));
        }
        Ok(out)
    }

    pub fn eval<F: super::field::Field>(&self, point: &[F]) -> Result<F> {
        if self.zero {
            return Ok(F::zero());
        }
        let mut v = self
            .factors
            .eval(point)?
            .mul(&eval_monomial(&self.unit, point)?);
        if self.sign < 0 {
            v = v.neg();
        }
        Ok(v)
    }
}

/// Bracket of an integer-coefficient class, `prod_m [m]^(coeff_m)`.
///
/// The trivial monomial with positive coefficient gives zero; with negative
/// coefficient it is a division by zero and is rejected.
pub fn bracket_class(v: &LaurentPoly) -> Result<FactoredRat> {
    let vars = v.vars();
    let mut out = FactoredRat::one(vars);
    for (m, c) in v.terms() {
        if !c.is_integer() {
            return Err(Error::NonIntegerCoefficient(c.to_string()));
        }
        if m.is_one() && c.is_negative() {
            return Err(Error::DivisionByTrivialBracket);
        }
    }
    for (m, c) in v.terms() {
        let k = c
            .to_integer()
            .to_i32()
            .ok_or_else(|| Error::NonIntegerCoefficient(c.to_string()))?;
        out.push(m, k)?;
    }
    if out.zero {
        return Ok(FactoredRat::zero(vars));
    }
    Ok(out)
}

impl fmt::Debug for FactoredRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zero {
            return write!(f, "0");
        }
        write!(f, "{}", if self.sign < 0 { "-" } else { "" })?;
        let (num, den) = self.factors.split();
        if !self.unit.is_one() {
            write!(f, "{}", self.unit.display(&self.vars))?;
            if num.is_empty() && den.is_empty() {
                return Ok(());
            }
            write!(f, "*")?;
        }
        let show = |f: &mut fmt::Formatter<'_>, parts: &[(&Monomial, u32)]| -> fmt::Result {
            if parts.is_empty() {
                return write!(f, "1");
            }
            for (m, k) in parts {
                write!(f, "[{}]", m.display(&self.vars))?;
                if *k > 1 {
                    write!(f, "^{k}")?;
                }
            }
            Ok(())
        };
        show(f, &num)?;
        if !den.is_empty() {
            write!(f, " / ")?;
            show(f, &den)?;
        }
        Ok(())
    }
}

impl fmt::Display for FactoredRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
