use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::vars::{Monomial, VarSet, Vars, GRID};
use crate::error::{Error, Result};

/// Sparse Laurent polynomial with exact rational coefficients. Exponents are
/// on the quarter grid; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    vars: Vars,
    terms: BTreeMap<Monomial, BigRational>,
}

impl LaurentPoly {
    pub fn zero(vars: &Vars) -> Self {
        LaurentPoly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, BigRational::one())
    }

    pub fn constant(vars: &Vars, c: BigRational) -> Self {
        Self::term(vars, vars.one(), c)
    }

    pub fn integer(vars: &Vars, c: i64) -> Self {
        Self::constant(vars, BigRational::from_integer(c.into()))
    }

    pub fn term(vars: &Vars, m: Monomial, c: BigRational) -> Self {
        assert_eq!(m.arity(), vars.len(), "monomial arity");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LaurentPoly {
            vars: vars.clone(),
            terms,
        }
    }

    pub fn monomial(vars: &Vars, m: Monomial) -> Self {
        Self::term(vars, m, BigRational::one())
    }

    /// Parses a name like `t1` or `y1^1/2` into a single-monomial polynomial.
    pub fn var(vars: &Vars, name: &str) -> Result<Self> {
        Ok(Self::monomial(vars, vars.parse_monomial(name)?))
    }

    pub fn from_terms<I>(vars: &Vars, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, BigRational)>,
    {
        let mut p = LaurentPoly::zero(vars);
        for (m, c) in terms {
            if m.arity() != vars.len() {
                return Err(Error::ArityMismatch(format!(
                    "monomial of arity {} in a ring of {} variables",
                    m.arity(),
                    vars.len()
                )));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    /// If this polynomial is `c * m` for a single monomial, returns it.
    pub fn as_term(&self) -> Option<(&Monomial, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.vars.check(&other.vars)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.vars.check(&other.vars)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return LaurentPoly::zero(&self.vars);
        }
        if let Some((m, c)) = other.as_term() {
            return self.mul_term(m, c);
        }
        if let Some((m, c)) = self.as_term() {
            return other.mul_term(m, c);
        }
        let mut acc: HashMap<Monomial, BigRational> =
            HashMap::with_capacity(self.len() * other.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let c = ca * cb;
                match acc.entry(ma.mul(mb)) {
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(c);
                    }
                    std::collections::hash_map::Entry::Occupied(mut e) => *e.get_mut() += c,
                }
            }
        }
        LaurentPoly {
            vars: self.vars.clone(),
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &BigRational) -> Self {
        if c.is_zero() {
            return LaurentPoly::zero(&self.vars);
        }
        LaurentPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(mm, cc)| (mm.mul(m), cc * c))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        self.mul_term(m, &BigRational::one())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        self.mul_term(&self.vars.one(), c)
    }

    fn neg_ref(&self) -> Self {
        LaurentPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = LaurentPoly::one(&self.vars);
        for _ in 0..k {
            acc = acc.mul_unchecked(self);
        }
        acc
    }

    /// Inverts every monomial, keeping coefficients.
    pub fn dual(&self) -> Self {
        LaurentPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.inv(), c.clone()))
                .collect(),
        }
    }

    /// Adams operation: every exponent multiplied by `k >= 1`.
    pub fn adams(&self, k: u32) -> Self {
        assert!(k >= 1, "adams needs a positive index");
        LaurentPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.pow(k as i32), c.clone()))
                .collect(),
        }
    }

    /// Simultaneous monomial substitution into the ring `target`. `images[i]`
    /// is the image of the `i`-th variable (of its first power).
    pub fn substitute(&self, target: &Vars, images: &[Monomial]) -> Result<Self> {
        let mut out = LaurentPoly::zero(target);
        for (m, c) in &self.terms {
            out.add_term(substitute_monomial(m, target, images)?, c.clone());
        }
        Ok(out)
    }

    /// Sum of coefficients.
    pub fn coefficient_sum(&self) -> BigRational {
        self.terms.values().fold(BigRational::zero(), |a, c| a + c)
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn filter<F: Fn(&Monomial) -> bool>(&self, keep: F) -> Self {
        LaurentPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Highest stored exponent of variable `var` together with its
    /// coefficient polynomial (still containing `var` at that power).
    pub fn leading_in(&self, var: usize) -> Option<(i32, LaurentPoly)> {
        let top = self.terms.keys().map(|m| m.exps()[var]).max()?;
        Some((top, self.filter(|m| m.exps()[var] == top)))
    }

    pub fn degree_bound(&self) -> u64 {
        self.terms
            .keys()
            .map(Monomial::degree_bound)
            .max()
            .unwrap_or(0)
    }

    /// Evaluates with `point[i]` the value of the quarter-root of variable
    /// `i`, so stored exponents act as integer powers.
    pub fn eval<F: super::field::Field>(&self, point: &[F]) -> Result<F> {
        let mut acc = F::zero();
        for (m, c) in &self.terms {
            acc = acc.add(&F::from_rational(c)?.mul(&eval_monomial(m, point)?));
        }
        Ok(acc)
    }

    /// Evaluates at values of the variables themselves; fails if some
    /// exponent is not integral.
    pub fn eval_integral<F: super::field::Field>(&self, point: &[F]) -> Result<F> {
        let mut acc = F::zero();
        for (m, c) in &self.terms {
            let mut v = F::from_rational(c)?;
            for (e, x) in m.exps().iter().zip(point) {
                if e % GRID != 0 {
                    return Err(Error::GridViolation(format!(
                        "fractional exponent {e}/{GRID} at an integral point"
                    )));
                }
                v = v.mul(&x.powi((e / GRID) as i64)?);
            }
            acc = acc.add(&v);
        }
        Ok(acc)
    }

    pub fn display(&self) -> String {
        format!("{self}")
    }
}

pub(crate) fn substitute_monomial(
    m: &Monomial,
    target: &Vars,
    images: &[Monomial],
) -> Result<Monomial> {
    if images.len() != m.arity() {
        return Err(Error::ArityMismatch(format!(
            "{} images for {} variables",
            images.len(),
            m.arity()
        )));
    }
    let mut out = vec![0i32; target.len()];
    for (&e, img) in m.exps().iter().zip(images) {
        if e == 0 {
            continue;
        }
        for (o, &ie) in out.iter_mut().zip(img.exps()) {
            let prod = e * ie;
            if prod % GRID != 0 {
                return Err(Error::GridViolation(format!(
                    "substitution produces exponent {prod}/{}",
                    GRID * GRID
                )));
            }
            *o += prod / GRID;
        }
    }
    Ok(Monomial::from_stored(&out))
}

pub(crate) fn eval_monomial<F: super::field::Field>(m: &Monomial, point: &[F]) -> Result<F> {
    let mut v = F::one();
    for (&e, x) in m.exps().iter().zip(point) {
        if e != 0 {
            v = v.mul(&x.powi(e as i64)?);
        }
    }
    Ok(v)
}

/// Parses `p/q` or `p` into a rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(
            s.trim().parse().map_err(|_| bad())?,
        )),
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i > 0 {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            } else if neg {
                write!(f, "-")?;
            }
            let a = c.abs();
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", m.display(&self.vars))?;
            } else {
                write!(f, "{a}*{}", m.display(&self.vars))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl VarSet {
    pub fn poly(self: &Vars, s: &str) -> Result<LaurentPoly> {
        LaurentPoly::parse(self, s)
    }
}

impl LaurentPoly {
    /// Parses sums like `1 - 3/2*t1^-1*y1 + t2^1/2`. A term is an optional
    /// rational coefficient followed by `*`-separated factors.
    pub fn parse(vars: &Vars, s: &str) -> Result<Self> {
        let mut out = LaurentPoly::zero(vars);
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        let mut prev = '+';
        for ch in s.chars().filter(|c| !c.is_whitespace()) {
            if (ch == '+' || ch == '-') && !matches!(prev, '^' | '(' | '/') {
                if !cur.is_empty() {
                    terms.push((neg, std::mem::take(&mut cur)));
                    neg = false;
                }
                if ch == '-' {
                    neg = !neg;
                }
            } else {
                cur.push(ch);
            }
            prev = ch;
        }
        if cur.is_empty() {
            return Err(Error::Parse(format!("bad polynomial `{s}`")));
        }
        terms.push((neg, cur));
        for (neg, t) in terms {
            let (coeff, mono) = match t.split_once('*') {
                Some((c, rest)) if parse_rational(c).is_ok() => (parse_rational(c)?, rest),
                _ => match parse_rational(&t) {
                    Ok(c) => (c, "1"),
                    Err(_) => (BigRational::one(), t.as_str()),
                },
            };
            let c = if neg { -coeff } else { coeff };
            out.add_term(vars.parse_monomial(mono)?, c);
        }
        Ok(out)
    }
}

// Operators panic on mismatched variable sets; use the `try_*` methods where
// the sets are not known to agree.
impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_add(rhs).expect("variable sets agree")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_sub(rhs).expect("variable sets agree")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_mul(rhs).expect("variable sets agree")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.neg_ref()
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> Vars {
        VarSet::standard(1, &["q"])
    }

    fn p(v: &Vars, s: &str) -> LaurentPoly {
        v.poly(s).unwrap()
    }

    #[test]
    fn parse_sums() {
        let v = VarSet::new(&["t1", "y1"]).unwrap();
        let p = LaurentPoly::parse(&v, "1 - 3/2*t1^-1*y1 + y1^1/2 - -2").unwrap();
        let mut q = LaurentPoly::integer(&v, 3);
        q.add_term(
            v.parse_monomial("t1^-1*y1").unwrap(),
            BigRational::new((-3).into(), 2.into()),
        );
        q.add_term(v.parse_monomial("y1^1/2").unwrap(), BigRational::one());
        assert_eq!(p, q);
        assert!(LaurentPoly::parse(&v, "1 +").is_err());
        assert!(LaurentPoly::parse(&v, "z").is_err());
    }

    #[test]
    fn difference_of_squares() {
        let v = ring();
        let one = LaurentPoly::one(&v);
        let t1 = p(&v, "t1");
        let prod = &(&t1 + &one) * &(&t1 - &one);
        assert_eq!(prod, &p(&v, "t1^2") - &one);
    }

    #[test]
    fn additive_inverse_is_empty() {
        let v = ring();
        let a = &p(&v, "t1^1/4*y1") + &p(&v, "q^-2");
        let z = &a + &(-&a);
        assert!(z.is_zero());
        assert_eq!(z.len(), 0);
    }

    #[test]
    fn half_exponents_multiply_exactly() {
        let v = ring();
        let a = &p(&v, "t1^1/2") - &p(&v, "t1^-1/2");
        let b = &p(&v, "t1^1/2") + &p(&v, "t1^-1/2");
        assert_eq!(&a * &b, &p(&v, "t1") - &p(&v, "t1^-1"));
    }

    #[test]
    fn arity_mismatch_is_an_error() {
        let a = LaurentPoly::one(&VarSet::standard(1, &[]));
        let b = LaurentPoly::one(&VarSet::standard(2, &[]));
        assert!(matches!(a.try_add(&b), Err(Error::ArityMismatch(_))));
        assert!(matches!(a.try_mul(&b), Err(Error::ArityMismatch(_))));
    }

    #[test]
    fn adams_examples() {
        let v = ring();
        let a = &p(&v, "t1^1/2") + &p(&v, "q");
        assert_eq!(a.adams(2), &p(&v, "t1") + &p(&v, "q^2"));
        assert_eq!(a.adams(1), a);
        let b = &p(&v, "t1") - &p(&v, "y1");
        assert_eq!(b.adams(2).adams(3), b.adams(6));
    }

    #[test]
    fn substitution_examples() {
        let v = VarSet::standard(1, &[]);
        let t1 = v.parse_monomial("t1").unwrap();
        let mut images: Vec<Monomial> = (0..v.len())
            .map(|i| {
                let mut m = v.one();
                m.0[i] = GRID;
                m
            })
            .collect();
        let y = v.index("y1").unwrap();
        images[y] = t1.clone();
        let diff = &p(&v, "y1") - &p(&v, "t1");
        assert!(diff.substitute(&v, &images).unwrap().is_zero());
        images[y] = v.parse_monomial("t4").unwrap();
        assert_eq!(
            p(&v, "y1").substitute(&v, &images).unwrap(),
            p(&v, "t1^-1*t2^-1*t3^-1")
        );
        // y -> t1^(1/4) applied to y^(1/2) would need an eighth root.
        images[y] = v.parse_monomial("t1^1/4").unwrap();
        assert!(p(&v, "y1^1/2").substitute(&v, &images).is_err());
    }

    #[test]
    fn framing_substitution_shape() {
        let src = VarSet::standard(2, &[]);
        let dst = VarSet::new(&["t1", "t2", "t3", "L", "y1", "y2"]).unwrap();
        let images: Vec<Monomial> = src
            .names()
            .iter()
            .map(|n| match n.as_str() {
                "w1" => dst.parse_monomial("L").unwrap(),
                "w2" => dst.parse_monomial("L^2").unwrap(),
                other => dst.parse_monomial(other).unwrap(),
            })
            .collect();
        let r = p(&src, "w2*w1^-1").substitute(&dst, &images).unwrap();
        assert_eq!(r, p(&dst, "L"));
    }

    #[test]
    fn evaluation() {
        let v = VarSet::new(&["t1"]).unwrap();
        let f = &p(&v, "t1") - &p(&v, "t1^-1");
        let four = BigRational::from_integer(4.into());
        assert_eq!(
            f.eval_integral(&[four]).unwrap(),
            BigRational::new(15.into(), 4.into())
        );
        // quarter-root value 2 means t1 = 16
        let two = BigRational::from_integer(2.into());
        assert_eq!(
            f.eval(&[two]).unwrap(),
            BigRational::new(255.into(), 16.into())
        );
        let half = &p(&v, "t1^1/2") - &p(&v, "t1^-1/2");
        assert!(crate::algebra::field::Field::is_zero(
            &half.eval(&[BigRational::one()]).unwrap()
        ));
    }

    #[test]
    fn leading_coefficient() {
        let v = VarSet::new(&["L", "y1"]).unwrap();
        let f = &(&p(&v, "L^2*y1") + &p(&v, "L^2")) + &p(&v, "L*y1^5");
        let (deg, lead) = f.leading_in(0).unwrap();
        assert_eq!(deg, 8);
        assert_eq!(lead, &p(&v, "L^2*y1") + &p(&v, "L^2"));
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(
            parse_rational("-3/6").unwrap(),
            BigRational::new((-1).into(), 2.into())
        );
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
