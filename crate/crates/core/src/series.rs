//! Truncated power series in `q`, the plethystic exponential and logarithm,
//! and the closed-form generating functions.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::json::RatFuncJson;
use crate::algebra::{BracketSum, FactoredRat, LaurentPoly, Monomial, Vars, GRID};
use crate::error::{Error, Result};

/// Coefficient rings for [`Series`].
pub trait Coeff: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    /// Structural zero test.
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: &BigRational) -> Self;
    fn adams(&self, k: u32) -> Self;
}

impl Coeff for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
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
    fn scale(&self, c: &BigRational) -> Self {
        self * c
    }
    fn adams(&self, _k: u32) -> Self {
        self.clone()
    }
}

impl Coeff for LaurentPoly {
    fn zero_like(&self) -> Self {
        LaurentPoly::zero(self.vars())
    }
    fn one_like(&self) -> Self {
        LaurentPoly::one(self.vars())
    }
    fn is_zero(&self) -> bool {
        LaurentPoly::is_zero(self)
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
    fn scale(&self, c: &BigRational) -> Self {
        LaurentPoly::scale(self, c)
    }
    fn adams(&self, k: u32) -> Self {
        LaurentPoly::adams(self, k)
    }
}

impl Coeff for BracketSum {
    fn zero_like(&self) -> Self {
        BracketSum::zero(self.vars())
    }
    fn one_like(&self) -> Self {
        BracketSum::one(self.vars())
    }
    fn is_zero(&self) -> bool {
        self.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        BracketSum::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        BracketSum::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        BracketSum::mul(self, other)
    }
    fn scale(&self, c: &BigRational) -> Self {
        BracketSum::scale(self, c)
    }
    fn adams(&self, k: u32) -> Self {
        BracketSum::adams(self, k)
    }
}

/// `c_0 + c_1 q + ... + c_N q^N`, truncated at the order `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series<C> {
    coeffs: Vec<C>,
}

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

impl<C: Coeff> Series<C> {
    /// Coefficients `c_0..=c_N`; at least `c_0` must be given.
    pub fn new(coeffs: Vec<C>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Precondition("a series needs c_0".into()));
        }
        Ok(Series { coeffs })
    }

    /// The zero series of order `n` over the ring of `proto`.
    pub fn zero(proto: &C, n: usize) -> Self {
        Series {
            coeffs: vec![proto.zero_like(); n + 1],
        }
    }

    pub fn one(proto: &C, n: usize) -> Self {
        let mut s = Series::zero(proto, n);
        s.coeffs[0] = proto.one_like();
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &C {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn map<D: Coeff, F: FnMut(&C) -> D>(&self, f: F) -> Series<D> {
        Series {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn try_map<D: Coeff, F: FnMut(&C) -> Result<D>>(&self, f: F) -> Result<Series<D>> {
        Ok(Series {
            coeffs: self.coeffs.iter().map(f).collect::<Result<_>>()?,
        })
    }

    fn same_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::Precondition(format!(
                "truncation orders differ: {} vs {}",
                self.order(),
                other.order()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        Ok(Series {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        Ok(Series {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        let n = self.order();
        let mut coeffs = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = self.coeffs[0].zero_like();
            for j in 0..=k {
                if self.coeffs[j].is_zero() || other.coeffs[k - j].is_zero() {
                    continue;
                }
                acc = acc.add(&self.coeffs[j].mul(&other.coeffs[k - j]));
            }
            coeffs.push(acc);
        }
        Ok(Series { coeffs })
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        self.map(|x| x.scale(c))
    }

    /// `exp(G)` for `c_0(G) = 0`, by `n e_n = sum_j j g_j e_{n-j}`.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Precondition("exp needs c_0 = 0".into()));
        }
        let n = self.order();
        let mut e = vec![self.coeffs[0].one_like()];
        for k in 1..=n {
            let mut acc = self.coeffs[0].zero_like();
            for j in 1..=k {
                if self.coeffs[j].is_zero() || e[k - j].is_zero() {
                    continue;
                }
                acc = acc.add(&self.coeffs[j].mul(&e[k - j]).scale(&rational(j as i64, 1)));
            }
            e.push(acc.scale(&rational(1, k as i64)));
        }
        Ok(Series { coeffs: e })
    }

    /// `log(F)` for `c_0(F) = 1`, by `l_n = f_n - (1/n) sum_{j<n} j l_j f_{n-j}`.
    pub fn log(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if !c0.sub(&c0.one_like()).is_zero() {
            return Err(Error::Precondition("log needs c_0 = 1".into()));
        }
        let n = self.order();
        let mut l = vec![c0.zero_like()];
        for k in 1..=n {
            let mut acc = c0.zero_like();
            for j in 1..k {
                if l[j].is_zero() || self.coeffs[k - j].is_zero() {
                    continue;
                }
                acc = acc.add(&l[j].mul(&self.coeffs[k - j]).scale(&rational(j as i64, 1)));
            }
            l.push(self.coeffs[k].sub(&acc.scale(&rational(1, k as i64))));
        }
        Ok(Series { coeffs: l })
    }

    /// `q^n -> q^(mn)` with the Adams operation on coefficients, re-truncated.
    pub fn adams_series(&self, m: u32) -> Self {
        assert!(m >= 1, "adams needs a positive index");
        let n = self.order();
        let mut out = Series::zero(&self.coeffs[0], n);
        for (k, c) in self.coeffs.iter().enumerate() {
            let t = k * m as usize;
            if t > n {
                break;
            }
            out.coeffs[t] = c.adams(m);
        }
        out
    }

    /// `Exp(F) = exp(sum_m adams(F, m) / m)`.
    pub fn pleth_exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Precondition("Exp needs c_0 = 0".into()));
        }
        let n = self.order();
        let mut g = Series::zero(&self.coeffs[0], n);
        for m in 1..=n.max(1) {
            g = g.add(&self.adams_series(m as u32).scale(&rational(1, m as i64)))?;
        }
        g.exp()
    }

    /// `Log(F) = sum_m mobius(m)/m adams(log F, m)`.
    pub fn pleth_log(&self) -> Result<Self> {
        let l = self.log()?;
        let n = self.order();
        let mut out = Series::zero(&self.coeffs[0], n);
        for m in 1..=n.max(1) {
            let mu = mobius(m as u64);
            if mu == 0 {
                continue;
            }
            out = out.add(
                &l.adams_series(m as u32)
                    .scale(&rational(mu as i64, m as i64)),
            )?;
        }
        Ok(out)
    }
}

/// The Moebius function.
pub fn mobius(m: u64) -> i8 {
    assert!(m >= 1, "mobius is defined on positive integers");
    let mut n = m;
    let mut sign = 1i8;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Expansion of `1 / ([x q][x q^-1])` in positive powers of `q`:
/// `c_n = -sum_{a+b=n-1} x^(a-b)`. Uses `[xq][xq^-1] = x + x^-1 - q - q^-1`.
pub fn bracket_pair_series(vars: &Vars, x: &Monomial, n: usize) -> Result<Series<LaurentPoly>> {
    if x.is_one() {
        return Err(Error::Precondition(
            "the bracket pair degenerates at x = 1".into(),
        ));
    }
    x.sqrt()?;
    let mut coeffs = vec![LaurentPoly::zero(vars)];
    for k in 1..=n {
        let mut c = LaurentPoly::zero(vars);
        for a in 0..k {
            let b = k - 1 - a;
            c.add_term(x.pow(a as i32 - b as i32), -BigRational::one());
        }
        coeffs.push(c);
    }
    Series::new(coeffs)
}

/// Closed-form generating functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosedForm {
    /// `Exp(F_t [y] / ([y^(1/2) q][y^(1/2) q^-1]))` with `y` the given
    /// monomial, usually `y1 ... yr`.
    Magnificent(Monomial),
    /// `Exp([t1t2][t1t3][t2t3] / ([t1][t2][t3][k^(1/2) q][k^(1/2) q^-1]))`,
    /// `k = t1 t2 t3`.
    Dt3,
    /// `Exp([t1t2][t1t3][t2t3][k^r] / ([t1][t2][t3][k][k^(r/2) q][k^(r/2) q^-1]))`.
    AwataKanno(u32),
}

impl ClosedForm {
    pub fn name(&self) -> &'static str {
        match self {
            ClosedForm::Magnificent(_) => "magnificent",
            ClosedForm::Dt3 => "dt3",
            ClosedForm::AwataKanno(_) => "awata-kanno",
        }
    }

    /// `Magnificent` at `y = y1 ... yr` for the framing rank of `vars`.
    pub fn magnificent(vars: &Vars) -> Result<Self> {
        let mut y = vars.one();
        for i in 1..=vars.rank() {
            y = y.mul(&vars.var(&format!("y{i}"), GRID)?);
        }
        Ok(ClosedForm::Magnificent(y))
    }

    /// The bracket prefactor and the pair argument `x`.
    fn parts(&self, vars: &Vars) -> Result<(FactoredRat, Monomial)> {
        let kappa = vars.parse_monomial("t1*t2*t3")?;
        // F_t [t4] is the t-prefactor without the [t4] denominator
        let t4 = kappa.inv();
        let mut factors = vec![(t4.clone(), 1)];
        let x = match self {
            ClosedForm::Magnificent(y) => {
                factors.push((t4, -1));
                factors.push((y.clone(), 1));
                y.sqrt()?
            }
            ClosedForm::Dt3 => kappa.sqrt()?,
            ClosedForm::AwataKanno(r) => {
                if *r == 0 {
                    return Err(Error::Precondition("rank must be at least 1".into()));
                }
                let r = *r as i32;
                factors.push((kappa.pow(r), 1));
                factors.push((kappa.clone(), -1));
                kappa.pow(r).sqrt()?
            }
        };
        let f = f_t(vars)?.mul(&FactoredRat::from_brackets(
            vars,
            factors.iter().map(|(m, k)| (m, *k)),
        )?)?;
        Ok((f, x))
    }

    /// The series inside `Exp`.
    pub fn exponent(&self, vars: &Vars, n: usize) -> Result<Series<BracketSum>> {
        let (f, x) = self.parts(vars)?;
        let pair = bracket_pair_series(vars, &x, n)?;
        let base = BracketSum::from_factored(&f);
        Ok(pair.map(|p| base.mul_poly(p)))
    }

    pub fn series(&self, vars: &Vars, n: usize) -> Result<Series<BracketSum>> {
        self.exponent(vars, n)?.pleth_exp()
    }
}

pub fn closed_form(kind: &ClosedForm, vars: &Vars, n: usize) -> Result<Series<BracketSum>> {
    kind.series(vars, n)
}

/// `[t1t2][t1t3][t2t3] / ([t1][t2][t3][t4])`.
pub fn f_t(vars: &Vars) -> Result<FactoredRat> {
    let m = |s: &str| vars.parse_monomial(s);
    let factors = [
        (m("t1*t2")?, 1),
        (m("t1*t3")?, 1),
        (m("t2*t3")?, 1),
        (m("t1")?, -1),
        (m("t2")?, -1),
        (m("t3")?, -1),
        (m("t4")?, -1),
    ];
    FactoredRat::from_brackets(vars, factors.iter().map(|(m, k)| (m, *k)))
}

impl Series<BracketSum> {
    pub fn substitute(&self, target: &Vars, images: &[Monomial]) -> Result<Self> {
        self.try_map(|c| c.substitute(target, images))
    }

    pub fn mul_factored(&self, f: &FactoredRat) -> Self {
        self.map(|c| c.mul_factored(f))
    }

    pub fn from_polys(s: &Series<LaurentPoly>) -> Self {
        s.map(|p| BracketSum::from_poly(p.clone()))
    }

    pub fn to_json(&self) -> Result<SeriesJson> {
        Ok(SeriesJson {
            order: self.order(),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| Ok(c.expand()?.to_json()))
                .collect::<Result<_>>()?,
        })
    }
}

/// Series as `{"order": N, "coeffs": [RatFunc, ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub order: usize,
    pub coeffs: Vec<RatFuncJson>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{CompareMode, VarSet};

    fn q(v: &[i64]) -> Series<BigRational> {
        Series::new(
            v.iter()
                .map(|&x| BigRational::from_integer(x.into()))
                .collect(),
        )
        .unwrap()
    }

    fn ints(s: &Series<BigRational>) -> Vec<i64> {
        s.coeffs()
            .iter()
            .map(|c| {
                assert!(c.is_integer());
                c.to_integer().try_into().unwrap()
            })
            .collect()
    }

    #[test]
    fn exp_of_q() {
        let e = q(&[0, 1, 0, 0]).exp().unwrap();
        let want: Vec<BigRational> = [1, 1, 2, 6].iter().map(|&d| rational(1, d)).collect();
        assert_eq!(e.coeffs(), want.as_slice());
        assert!(q(&[1, 1]).exp().is_err());
        assert!(q(&[2, 1]).log().is_err());
    }

    #[test]
    fn product_truncates() {
        let a = q(&[1, 1, 0]);
        let b = q(&[1, -1, 0]);
        assert_eq!(a.mul(&b).unwrap(), q(&[1, 0, -1]));
        assert!(a.mul(&q(&[1, 1])).is_err());
    }

    #[test]
    fn mobius_values() {
        let got: Vec<i8> = (1..=12).map(mobius).collect();
        assert_eq!(got, [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]);
    }

    #[test]
    fn exp_of_q_is_geometric() {
        let e = q(&[0, 1, 0, 0, 0, 0]).pleth_exp().unwrap();
        assert_eq!(ints(&e), [1, 1, 1, 1, 1, 1]);
        assert_eq!(ints(&e.pleth_log().unwrap()), [0, 1, 0, 0, 0, 0]);
    }

    /// prod_k (1 - q^k)^(-e(k)) by repeated geometric multiplication
    fn product_oracle(n: usize, e: impl Fn(usize) -> usize) -> Vec<i64> {
        let mut c = vec![0i64; n + 1];
        c[0] = 1;
        for k in 1..=n {
            for _ in 0..e(k) {
                for i in k..=n {
                    c[i] += c[i - k];
                }
            }
        }
        c
    }

    #[test]
    fn euler_and_macmahon() {
        let euler = q(&[0, 1, 1, 1, 1, 1, 1, 1, 1]).pleth_exp().unwrap();
        assert_eq!(ints(&euler), product_oracle(8, |_| 1));
        assert_eq!(&ints(&euler)[..7], [1, 1, 2, 3, 5, 7, 11]);
        let mac = q(&[0, 1, 2, 3, 4, 5, 6, 7, 8]).pleth_exp().unwrap();
        assert_eq!(ints(&mac), product_oracle(8, |k| k));
        assert_eq!(&ints(&mac)[..7], [1, 1, 3, 6, 13, 24, 48]);
        assert_eq!(
            ints(&euler.pleth_log().unwrap()),
            [0, 1, 1, 1, 1, 1, 1, 1, 1]
        );
    }

    #[test]
    fn adams_series_examples() {
        let v = VarSet::new(&["t1"]).unwrap();
        let t1 = v.poly("t1").unwrap();
        let z = LaurentPoly::zero(&v);
        let f = Series::new(vec![
            z.clone(),
            t1.clone(),
            z.clone(),
            t1.clone(),
            z.clone(),
        ])
        .unwrap();
        let g = f.adams_series(2);
        assert_eq!(g.coeff(2), &v.poly("t1^2").unwrap());
        assert!(g.coeff(3).is_zero());
        assert!(g.coeff(4).is_zero());
        assert_eq!(f.adams_series(1), f);
    }

    #[test]
    fn pair_series_coefficients() {
        let v = VarSet::standard(1, &[]);
        let x = v.parse_monomial("y1^1/2").unwrap();
        let s = bracket_pair_series(&v, &x, 3).unwrap();
        assert_eq!(s.coeff(1), &v.poly("-1").unwrap());
        assert_eq!(s.coeff(2), &v.poly("-y1^1/2 - y1^-1/2").unwrap());
        assert_eq!(s.coeff(3), &v.poly("-y1 - 1 - y1^-1").unwrap());
        assert!(bracket_pair_series(&v, &v.one(), 3).is_err());
    }

    /// (x + 1/x - q - 1/q) S = 1 + O(q^N), coefficientwise.
    fn back_multiply(vars: &Vars, x: &Monomial, n: usize) {
        let s = bracket_pair_series(vars, x, n + 1).unwrap();
        let xs = &LaurentPoly::monomial(vars, x.clone()) + &LaurentPoly::monomial(vars, x.inv());
        for k in 0..=n {
            let mut c = &xs * s.coeff(k);
            if k >= 1 {
                c = &c - s.coeff(k - 1);
            }
            c = &c - s.coeff(k + 1);
            let want = if k == 0 {
                LaurentPoly::one(vars)
            } else {
                LaurentPoly::zero(vars)
            };
            assert_eq!(c, want, "order {k}");
        }
    }

    #[test]
    fn pair_series_back_multiplication() {
        let v = VarSet::standard(1, &[]);
        for x in ["y1^1/2", "t1^1/2*t2^1/2*t3^1/2", "t1^3/2*t2^3/2*t3^3/2"] {
            back_multiply(&v, &v.parse_monomial(x).unwrap(), 6);
        }
    }

    #[test]
    fn magnificent_first_order() {
        let v = VarSet::standard(1, &[]);
        let z = closed_form(&ClosedForm::magnificent(&v).unwrap(), &v, 2).unwrap();
        let y = v.parse_monomial("y1").unwrap();
        let want = f_t(&v)
            .unwrap()
            .mul(&FactoredRat::from_brackets(&v, [(&y, 1)]).unwrap())
            .unwrap()
            .negate();
        assert!(BracketSum::one(&v)
            .equals(z.coeff(0), CompareMode::Exact)
            .unwrap());
        assert!(BracketSum::from(&want)
            .equals(z.coeff(1), CompareMode::Exact)
            .unwrap());
    }

    #[test]
    fn specializations_agree() {
        let v = VarSet::standard(1, &[]);
        let mut images = v.embedding(&v).unwrap();
        images[v.index("y1").unwrap()] = v.parse_monomial("t4").unwrap();
        let n = 3;
        let mag = closed_form(&ClosedForm::magnificent(&v).unwrap(), &v, n)
            .unwrap()
            .substitute(&v, &images)
            .unwrap();
        let dt3 = closed_form(&ClosedForm::Dt3, &v, n).unwrap();
        let ak1 = closed_form(&ClosedForm::AwataKanno(1), &v, n).unwrap();
        for k in 0..=n {
            let m = CompareMode::random(5);
            assert!(mag.coeff(k).equals(dt3.coeff(k), m).unwrap(), "order {k}");
            assert!(ak1
                .coeff(k)
                .equals(dt3.coeff(k), CompareMode::Exact)
                .unwrap());
        }
    }
}
