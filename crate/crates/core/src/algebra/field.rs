//! Evaluation targets: exact rationals and a 64-bit prime field.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The largest prime below 2^64. Randomized identity tests sample here.
pub const PRIME: u64 = 18_446_744_073_709_551_557;

/// The arithmetic needed to evaluate polynomials and rational functions.
pub trait Field: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn inv(&self) -> Result<Self>;
    fn from_rational(q: &BigRational) -> Result<Self>;

    fn neg(&self) -> Self {
        Self::zero().sub(self)
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Signed power; negative exponents need an invertible base.
    fn powi(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            Ok(self.inv()?.pow(e.unsigned_abs()))
        }
    }
}

/// Element of the prime field of size [`PRIME`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fp(u64);

impl Fp {
    pub fn new(v: u64) -> Self {
        Fp(v % PRIME)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn from_bigint(n: &BigInt) -> Fp {
        let p = BigInt::from(PRIME);
        let mut r = n % &p;
        if r.is_negative() {
            r += &p;
        }
        Fp(r.to_u64().expect("reduced below the modulus"))
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Field for Fp {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn add(&self, other: &Self) -> Self {
        let s = self.0 as u128 + other.0 as u128;
        Fp((s % PRIME as u128) as u64)
    }
    fn sub(&self, other: &Self) -> Self {
        if self.0 >= other.0 {
            Fp(self.0 - other.0)
        } else {
            Fp((self.0 as u128 + PRIME as u128 - other.0 as u128) as u64)
        }
    }
    fn mul(&self, other: &Self) -> Self {
        Fp(((self.0 as u128 * other.0 as u128) % PRIME as u128) as u64)
    }
    fn inv(&self) -> Result<Self> {
        if self.0 == 0 {
            return Err(Error::DenominatorVanishes);
        }
        Ok(self.pow(PRIME - 2))
    }
    fn from_rational(q: &BigRational) -> Result<Self> {
        let n = Fp::from_bigint(q.numer());
        let d = Fp::from_bigint(q.denom());
        Ok(n.mul(&d.inv()?))
    }
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn inv(&self) -> Result<Self> {
        if Zero::is_zero(self) {
            return Err(Error::DenominatorVanishes);
        }
        Ok(self.recip())
    }
    fn from_rational(q: &BigRational) -> Result<Self> {
        Ok(q.clone())
    }
}
