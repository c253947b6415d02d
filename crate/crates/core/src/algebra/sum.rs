//! Lazy sums of bracket products.
//!
//! Localization weights arrive fully factored, and the closed forms are
//! products of brackets with polynomial coefficients. [`BracketSum`] keeps
//! every term as `poly * prod [m]^k` and merges terms with the same bracket
//! multiset, so nothing is expanded until a comparison asks for it.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::BigRational;

use super::bracket::{bracket_monomial, eval_bracket, Brackets, FactoredRat, Push};
use super::kernel::{self, Job};
use super::pit::{self, CompareMode};
use super::poly::{substitute_monomial, LaurentPoly};
use super::ratfunc::RatFunc;
use super::vars::{Monomial, Vars};
use crate::error::Result;

#[derive(Clone, PartialEq, Eq)]
pub struct BracketSum {
    vars: Vars,
    terms: BTreeMap<Brackets, LaurentPoly>,
}

impl BracketSum {
    pub fn zero(vars: &Vars) -> Self {
        BracketSum {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: &Vars) -> Self {
        Self::from_poly(LaurentPoly::one(vars))
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        let mut s = BracketSum::zero(p.vars());
        s.add_term(Brackets::new(), p);
        s
    }

    pub fn from_factored(f: &FactoredRat) -> Self {
        let mut s = BracketSum::zero(f.vars());
        if !f.is_zero() {
            s.add_term(f.factors().clone(), f.prefactor());
        }
        s
    }

    pub fn term(poly: LaurentPoly, brackets: Brackets) -> Self {
        let mut s = BracketSum::zero(poly.vars());
        s.add_term(brackets, poly);
        s
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    /// Number of distinct bracket multisets.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Structurally zero. Use [`BracketSum::is_zero_exact`] for the
    /// mathematical test.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Brackets, &LaurentPoly)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, b: Brackets, p: LaurentPoly) {
        if p.is_zero() {
            return;
        }
        match self.terms.entry(b) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &p;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &BracketSum) -> BracketSum {
        let mut out = self.clone();
        for (b, p) in &other.terms {
            out.add_term(b.clone(), p.clone());
        }
        out
    }

    pub fn neg(&self) -> BracketSum {
        BracketSum {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(b, p)| (b.clone(), -p)).collect(),
        }
    }

    pub fn sub(&self, other: &BracketSum) -> BracketSum {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &BracketSum) -> BracketSum {
        let mut out = BracketSum::zero(&self.vars);
        for (ba, pa) in &self.terms {
            for (bb, pb) in &other.terms {
                out.add_term(ba.mul(bb), pa * pb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> BracketSum {
        let mut out = BracketSum::zero(&self.vars);
        for (b, p) in &self.terms {
            out.add_term(b.clone(), p.scale(c));
        }
        out
    }

    pub fn mul_poly(&self, q: &LaurentPoly) -> BracketSum {
        let mut out = BracketSum::zero(&self.vars);
        for (b, p) in &self.terms {
            out.add_term(b.clone(), p * q);
        }
        out
    }

    pub fn mul_factored(&self, f: &FactoredRat) -> BracketSum {
        self.mul(&BracketSum::from_factored(f))
    }

    pub fn adams(&self, k: u32) -> BracketSum {
        let mut out = BracketSum::zero(&self.vars);
        for (b, p) in &self.terms {
            out.add_term(b.adams(k), p.adams(k));
        }
        out
    }

    /// Monomial substitution term by term. Terms whose numerator acquires a
    /// trivial bracket vanish; a trivial bracket in a denominator is an
    /// error.
    pub fn substitute(&self, target: &Vars, images: &[Monomial]) -> Result<BracketSum> {
        let mut out = BracketSum::zero(target);
        for (b, p) in &self.terms {
            let mut nb = Brackets::new();
            let mut sign = 1i8;
            let mut zero = false;
            let (num, den) = b.split();
            for (m, k) in den {
                match nb.push(&substitute_monomial(m, target, images)?, -(k as i32))? {
                    Push::Sign(s) => sign *= s,
                    Push::Zero => unreachable!("negative multiplicity never zeroes"),
                }
            }
            for (m, k) in num {
                match nb.push(&substitute_monomial(m, target, images)?, k as i32)? {
                    Push::Sign(s) => sign *= s,
                    Push::Zero => zero = true,
                }
            }
            if zero {
                continue;
            }
            let mut np = p.substitute(target, images)?;
            if sign < 0 {
                np = -np;
            }
            out.add_term(nb, np);
        }
        Ok(out)
    }

    pub fn eval<F: super::field::Field>(&self, point: &[F]) -> Result<F> {
        let mut cache: HashMap<&Monomial, F> = HashMap::new();
        let mut acc = F::zero();
        for (b, p) in &self.terms {
            let mut num = p.eval(point)?;
            let mut den = F::one();
            for (m, k) in b.iter() {
                let v = match cache.get(m) {
                    Some(v) => v.clone(),
                    None => {
                        let v = eval_bracket(m, point)?;
                        cache.insert(m, v.clone());
                        v
                    }
                };
                if k > 0 {
                    num = num.mul(&v.pow(k as u64));
                } else {
                    den = den.mul(&v.pow((-k) as u64));
                }
            }
            acc = acc.add(&num.mul(&den.inv()?));
        }
        Ok(acc)
    }

    pub fn degree_bound(&self) -> u64 {
        self.terms
            .iter()
            .map(|(b, p)| b.degree_bound() + p.degree_bound())
            .max()
            .unwrap_or(0)
    }

    /// Common denominator (as brackets with positive multiplicity) and the
    /// exponent each term's brackets take over it.
    fn common_denominator(&self) -> BTreeMap<Monomial, u32> {
        let mut den: BTreeMap<Monomial, u32> = BTreeMap::new();
        for b in self.terms.keys() {
            for (m, k) in b.iter() {
                if k < 0 {
                    let e = den.entry(m.clone()).or_insert(0);
                    *e = (*e).max((-k) as u32);
                }
            }
        }
        den
    }

    /// Terms over the common denominator, each with the brackets it still
    /// needs, after dividing out the brackets shared by every term.
    fn numerator_jobs(
        &self,
    ) -> (
        Vec<Job>,
        BTreeMap<Monomial, u32>,
        BTreeMap<Monomial, u32>,
    ) {
        let den = self.common_denominator();
        let mut exps: Vec<BTreeMap<Monomial, u32>> = Vec::with_capacity(self.terms.len());
        for b in self.terms.keys() {
            let mut e = den.clone();
            for (m, k) in b.iter() {
                let slot = e.entry(m.clone()).or_insert(0);
                *slot = (*slot as i64 + k as i64) as u32;
            }
            e.retain(|_, k| *k > 0);
            exps.push(e);
        }
        let mut common: BTreeMap<Monomial, u32> = BTreeMap::new();
        if let Some(first) = exps.first() {
            for m in first.keys() {
                let g = exps
                    .iter()
                    .map(|e| e.get(m).copied().unwrap_or(0))
                    .min()
                    .unwrap_or(0);
                if g > 0 {
                    common.insert(m.clone(), g);
                }
            }
        }
        let jobs = self
            .terms
            .values()
            .zip(exps)
            .map(|(p, mut e)| {
                for (m, g) in &common {
                    let k = e.get_mut(m).expect("common to all terms");
                    *k -= g;
                }
                e.retain(|_, k| *k > 0);
                (p.clone(), e)
            })
            .collect();
        (jobs, common, den)
    }

    /// Exact zero test by clearing the common bracket denominator. Fails
    /// with a resource error when the numerator grows too large.
    pub fn is_zero_exact(&self) -> Result<bool> {
        if self.terms.is_empty() {
            return Ok(true);
        }
        kernel::numerator_is_zero(self.numerator_jobs().0)
    }

    /// Single quotient over the union of bracket denominators.
    pub fn expand(&self) -> Result<RatFunc> {
        if self.terms.is_empty() {
            return Ok(RatFunc::zero(&self.vars));
        }
        let (jobs, common, den) = self.numerator_jobs();
        let mut num = kernel::numerator(&self.vars, jobs)?;
        for (m, k) in &common {
            let b = bracket_monomial(&self.vars, m).expect("grid checked");
            num = &num * &b.pow(*k);
        }
        let mut d = LaurentPoly::one(&self.vars);
        for (m, k) in &den {
            let b = bracket_monomial(&self.vars, m).expect("grid checked");
            d = &d * &b.pow(*k);
        }
        RatFunc::new(num, d)
    }

    /// Extensional equality in the requested mode.
    pub fn equals(&self, other: &BracketSum, mode: CompareMode) -> Result<bool> {
        self.vars.check(&other.vars)?;
        match mode {
            CompareMode::Exact => self.sub(other).is_zero_exact(),
            CompareMode::Random { trials, seed } => {
                pit::agree_at_random_points(self.vars.len(), trials, seed, |pt| {
                    Ok((self.eval(pt)?, other.eval(pt)?))
                })
            }
        }
    }
}

impl From<&FactoredRat> for BracketSum {
    fn from(f: &FactoredRat) -> Self {
        BracketSum::from_factored(f)
    }
}

impl fmt::Debug for BracketSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (b, p)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let fr = FactoredRat::from_parts(&self.vars, 1, self.vars.one(), b.clone());
            if p.is_one() {
                write!(f, "{fr:?}")?;
            } else {
                write!(f, "({p})*{fr:?}")?;
            }
        }
        Ok(())
    }
}
