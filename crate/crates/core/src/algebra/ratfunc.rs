use std::fmt;

use super::pit::{self, CompareMode};
use super::poly::LaurentPoly;
use super::vars::{Monomial, Vars};
use crate::error::{Error, Result};

/// Quotient of Laurent polynomials. No gcd is taken: equality is decided by
/// cross-multiplication or by evaluation, never by comparing fields.
#[derive(Clone)]
pub struct RatFunc {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RatFunc {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self> {
        num.vars().check(den.vars())?;
        if den.is_zero() {
            return Err(Error::DenominatorVanishes);
        }
        Ok(RatFunc { num, den })
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        let den = LaurentPoly::one(p.vars());
        RatFunc { num: p, den }
    }

    pub fn zero(vars: &Vars) -> Self {
        RatFunc::from_poly(LaurentPoly::zero(vars))
    }

    pub fn one(vars: &Vars) -> Self {
        RatFunc::from_poly(LaurentPoly::one(vars))
    }

    pub fn vars(&self) -> &Vars {
        self.num.vars()
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &RatFunc) -> Result<RatFunc> {
        self.vars().check(other.vars())?;
        if self.den == other.den {
            return RatFunc::new(&self.num + &other.num, self.den.clone());
        }
        RatFunc::new(
            &(&self.num * &other.den) + &(&other.num * &self.den),
            &self.den * &other.den,
        )
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &RatFunc) -> Result<RatFunc> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFunc) -> Result<RatFunc> {
        self.vars().check(other.vars())?;
        RatFunc::new(&self.num * &other.num, &self.den * &other.den)
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc> {
        self.vars().check(other.vars())?;
        RatFunc::new(&self.num * &other.den, &self.den * &other.num)
    }

    pub fn adams(&self, k: u32) -> RatFunc {
        RatFunc {
            num: self.num.adams(k),
            den: self.den.adams(k),
        }
    }

    pub fn substitute(&self, target: &Vars, images: &[Monomial]) -> Result<RatFunc> {
        RatFunc::new(
            self.num.substitute(target, images)?,
            self.den.substitute(target, images)?,
        )
    }

    /// Value at quarter-root coordinates; fails if the denominator vanishes.
    pub fn eval<F: super::field::Field>(&self, point: &[F]) -> Result<F> {
        let d = self.den.eval(point)?;
        if d.is_zero() {
            return Err(Error::DenominatorVanishes);
        }
        Ok(self.num.eval(point)?.mul(&d.inv()?))
    }

    pub fn eval_integral<F: super::field::Field>(&self, point: &[F]) -> Result<F> {
        let d = self.den.eval_integral(point)?;
        if d.is_zero() {
            return Err(Error::DenominatorVanishes);
        }
        Ok(self.num.eval_integral(point)?.mul(&d.inv()?))
    }

    pub fn degree_bound(&self) -> u64 {
        self.num.degree_bound() + self.den.degree_bound()
    }

    /// Extensional equality.
    pub fn equals(&self, other: &RatFunc, mode: CompareMode) -> Result<bool> {
        self.vars().check(other.vars())?;
        match mode {
            CompareMode::Exact => Ok(&self.num * &other.den == &other.num * &self.den),
            CompareMode::Random { trials, seed } => {
                let n = self.vars().len();
                pit::agree_at_random_points(n, trials, seed, |pt| {
                    Ok((self.eval(pt)?, other.eval(pt)?))
                })
            }
        }
    }
}

/// `a == b` as rational functions in the given mode.
pub fn rat_equal(a: &RatFunc, b: &RatFunc, mode: CompareMode) -> Result<bool> {
    a.equals(b, mode)
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}
