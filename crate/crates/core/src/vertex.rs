//! K-theory classes of the rank-`r` vertex and the signed localization
//! weight `(-1)^mu [-v]`.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::algebra::json::FactoredJson;
use crate::algebra::{
    bracket_class, bracket_monomial, BracketSum, CompareMode, FactoredRat, LaurentPoly, Monomial,
    RatFunc, VarGroup, Vars, GRID,
};
use crate::error::{Error, Result};
use crate::partitions::{PartitionTuple, SolidPartition};

/// An integer-coefficient Laurent character.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KClass(LaurentPoly);

impl KClass {
    pub fn new(p: LaurentPoly) -> Result<Self> {
        if !p.is_integral() {
            return Err(Error::NonIntegerCoefficient(p.display()));
        }
        Ok(KClass(p))
    }

    pub fn zero(vars: &Vars) -> Self {
        KClass(LaurentPoly::zero(vars))
    }

    pub fn poly(&self) -> &LaurentPoly {
        &self.0
    }

    pub fn into_poly(self) -> LaurentPoly {
        self.0
    }

    pub fn vars(&self) -> &Vars {
        self.0.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn dual(&self) -> KClass {
        KClass(self.0.dual())
    }

    /// Sum of coefficients.
    pub fn rank(&self) -> i64 {
        self.0
            .coefficient_sum()
            .to_integer()
            .to_i64()
            .expect("rank fits in i64")
    }

    /// Terms whose exponents vanish on every variable of the masked groups.
    pub fn fixed_part(&self, mask: TorusMask) -> KClass {
        let vars = self.vars().clone();
        KClass(self.0.filter(|m| {
            m.exps()
                .iter()
                .enumerate()
                .all(|(i, &e)| e == 0 || !mask.covers(vars.group(i)))
        }))
    }

    pub fn add(&self, other: &KClass) -> KClass {
        KClass(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &KClass) -> KClass {
        KClass(&self.0 - &other.0)
    }

    pub fn mul(&self, other: &KClass) -> KClass {
        KClass(&self.0 * &other.0)
    }

    pub fn neg(&self) -> KClass {
        KClass(-&self.0)
    }

    pub fn mul_monomial(&self, m: &Monomial) -> KClass {
        KClass(self.0.mul_monomial(m))
    }

    pub fn bracket(&self) -> Result<FactoredRat> {
        bracket_class(&self.0)
    }
}

/// Which variable groups must be trivial for a term to count as fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusMask {
    pub t: bool,
    pub w: bool,
    pub y: bool,
}

impl TorusMask {
    pub const T: TorusMask = TorusMask {
        t: true,
        w: false,
        y: false,
    };
    pub const FULL: TorusMask = TorusMask {
        t: true,
        w: true,
        y: true,
    };

    pub fn new(t: bool, w: bool, y: bool) -> Result<Self> {
        if !(t || w || y) {
            return Err(Error::Precondition("empty torus mask".into()));
        }
        Ok(TorusMask { t, w, y })
    }

    fn covers(self, g: VarGroup) -> bool {
        match g {
            VarGroup::T => self.t,
            VarGroup::W => self.w,
            VarGroup::Y => self.y,
            VarGroup::Aux => false,
        }
    }
}

/// Character of a partition as a class.
pub fn character(p: &SolidPartition, vars: &Vars) -> KClass {
    KClass(p.character(vars))
}

/// `(1 - t1^-1)(1 - t2^-1)(1 - t3^-1)`.
fn p_factor(vars: &Vars) -> LaurentPoly {
    let mut acc = LaurentPoly::one(vars);
    for k in 0..3 {
        let mut e = [0; 4];
        e[k] = -1;
        let t = LaurentPoly::monomial(vars, vars.t_monomial(e));
        acc = &acc * &(&LaurentPoly::one(vars) - &t);
    }
    acc
}

fn check_rank(vars: &Vars, t: &PartitionTuple) -> Result<()> {
    if vars.rank() != t.rank() {
        return Err(Error::ArityMismatch(format!(
            "tuple of rank {} in a ring with {} framing variables",
            t.rank(),
            vars.rank()
        )));
    }
    Ok(())
}

fn slot(vars: &Vars, t: &PartitionTuple, a: usize) -> Result<()> {
    if a == 0 || a > t.rank() {
        return Err(Error::Precondition(format!(
            "index {a} outside 1..={}",
            t.rank()
        )));
    }
    check_rank(vars, t)
}

/// `w_b / w_a`.
fn framing_ratio(vars: &Vars, a: usize, b: usize) -> Result<Monomial> {
    Ok(vars
        .var(&format!("w{b}"), GRID)?
        .div(&vars.var(&format!("w{a}"), GRID)?))
}

/// `v^pre_{ab} = (w_b / w_a) (Z_b - P Z_a^dual Z_b)` with
/// `P = (1 - t1^-1)(1 - t2^-1)(1 - t3^-1)`; indices are 1-based.
pub fn vertex_pre(vars: &Vars, t: &PartitionTuple, a: usize, b: usize) -> Result<KClass> {
    slot(vars, t, a)?;
    slot(vars, t, b)?;
    let za = t.parts[a - 1].character(vars);
    let zb = t.parts[b - 1].character(vars);
    if zb.is_zero() {
        return Ok(KClass::zero(vars));
    }
    let inner = &zb - &(&(&p_factor(vars) * &za.dual()) * &zb);
    Ok(KClass(inner.mul_monomial(&framing_ratio(vars, a, b)?)))
}

/// `v_{ab} = v^pre_{ab} - (w_b / w_a) y_b Z_a^dual`.
pub fn vertex_component(vars: &Vars, t: &PartitionTuple, a: usize, b: usize) -> Result<KClass> {
    let pre = vertex_pre(vars, t, a, b)?;
    let za = t.parts[a - 1].character(vars);
    let yb = vars.var(&format!("y{b}"), GRID)?;
    let shift = za.dual().mul_monomial(&yb.mul(&framing_ratio(vars, a, b)?));
    Ok(KClass(pre.poly() - &shift))
}

/// `v = sum_{a,b} v_{ab}`. A surviving fixed term is an invariant violation.
pub fn vertex_full(vars: &Vars, t: &PartitionTuple) -> Result<KClass> {
    check_rank(vars, t)?;
    let r = t.rank();
    let mut acc = LaurentPoly::zero(vars);
    for a in 1..=r {
        for b in 1..=r {
            acc = &acc + vertex_component(vars, t, a, b)?.poly();
        }
    }
    let v = KClass(acc);
    let fixed = v.fixed_part(TorusMask::FULL);
    if !fixed.is_zero() {
        return Err(Error::InvariantViolation(format!(
            "fixed terms {} in the vertex of {}",
            fixed.poly(),
            t.to_json_string()
        )));
    }
    Ok(v)
}

/// `(-1)^mu [-v]`.
pub fn np_weight(vars: &Vars, t: &PartitionTuple) -> Result<FactoredRat> {
    let v = vertex_full(vars, t)?;
    let w = v.neg().bracket().map_err(|e| {
        Error::InvariantViolation(format!("bracket of -v for {}: {e}", t.to_json_string()))
    })?;
    if w.is_zero() {
        return Err(Error::InvariantViolation(format!(
            "vanishing weight for {}",
            t.to_json_string()
        )));
    }
    Ok(if t.mu() % 2 == 1 { w.negate() } else { w })
}

/// The weight rebuilt by applying `[.]` to each monomial of `-v` separately
/// and multiplying the resulting polynomials, with no factored bookkeeping.
pub fn np_weight_termwise(vars: &Vars, t: &PartitionTuple) -> Result<RatFunc> {
    let v = vertex_full(vars, t)?;
    let mut num = LaurentPoly::one(vars);
    let mut den = LaurentPoly::one(vars);
    for (m, c) in v.neg().poly().terms() {
        let k = c
            .to_integer()
            .to_i64()
            .ok_or_else(|| Error::NonIntegerCoefficient(c.to_string()))?;
        let b = bracket_monomial(vars, m)?;
        if k > 0 {
            num = &num * &b.pow(k as u32);
        } else {
            den = &den * &b.pow((-k) as u32);
        }
    }
    if t.mu() % 2 == 1 {
        num = -num;
    }
    RatFunc::new(num, den)
}

/// Images sending `t_k` to `t_{sigma(k)}`, with `t4` re-eliminated; other
/// variables are fixed.
pub fn t_permutation_images(vars: &Vars, sigma: &[usize; 4]) -> Vec<Monomial> {
    let mut images = vars.embedding(vars).expect("identity embedding");
    for k in 0..3 {
        let mut e = [0; 4];
        e[sigma[k]] = 1;
        let idx = vars
            .index(["t1", "t2", "t3"][k])
            .expect("t variables present");
        images[idx] = vars.t_monomial(e);
    }
    images
}

/// Whether the weight of `sigma . T` equals the weight of `T` with the
/// equivariant parameters permuted by `sigma`.
pub fn weight_permuted_equal(
    vars: &Vars,
    t: &PartitionTuple,
    sigma: &[usize; 4],
    mode: CompareMode,
) -> Result<bool> {
    let lhs = np_weight(vars, &t.permute(sigma))?;
    let rhs = np_weight(vars, t)?.substitute(vars, &t_permutation_images(vars, sigma))?;
    if lhs == rhs {
        return Ok(true);
    }
    BracketSum::from(&lhs).equals(&BracketSum::from(&rhs), mode)
}

/// `dim (t1 t2 t3 Z^dual Z)^fixed` over the `t` torus.
pub fn fixed_pair_dimension(p: &SolidPartition, vars: &Vars) -> i64 {
    let z = character(p, vars);
    let kappa = vars.t_monomial([1, 1, 1, 0]);
    z.dual()
        .mul(&z)
        .mul_monomial(&kappa)
        .fixed_part(TorusMask::T)
        .rank()
}

/// Behaviour of `[-v_ab][-v_ba]` as the framing goes to infinity along
/// `w_i = L^i`. `l_degree` is the stored `L`-exponent of the leading term
/// and `limit` its coefficient, `L`-free.
#[derive(Clone, Debug)]
pub struct FramingLimit {
    pub l_degree: i32,
    pub limit: FactoredRat,
}

/// Needs `vars` to carry an auxiliary `L`; every `w_i` is sent to `L^i`.
pub fn framing_limit(vars: &Vars, t: &PartitionTuple, a: usize, b: usize) -> Result<FramingLimit> {
    let l = vars.index("L")?;
    let class = vertex_component(vars, t, a, b)?.add(&vertex_component(vars, t, b, a)?);
    let images = framing_images(vars)?;
    let w = class.neg().bracket()?.substitute(vars, &images)?;
    if w.is_zero() {
        return Err(Error::InvariantViolation(
            "vanishing off-diagonal weight".into(),
        ));
    }
    // [m] ~ m^(1/2) when L appears with positive exponent, -m^(-1/2) when
    // negative; L-free factors stay.
    let mut sign = w.sign();
    let mut unit = w.unit().clone();
    let mut rest = Vec::new();
    for (m, k) in w.factors().iter() {
        let e = m.exps()[l];
        if e == 0 {
            rest.push((m.clone(), k));
            continue;
        }
        let lead = if e > 0 { m.sqrt()? } else { m.inv().sqrt()? };
        if e < 0 && k % 2 != 0 {
            sign = -sign;
        }
        unit = unit.mul(&lead.pow(k));
    }
    let l_degree = unit.exps()[l];
    unit.0[l] = 0;
    let mut limit = FactoredRat::from_brackets(vars, rest.iter().map(|(m, k)| (m, *k)))?;
    limit = limit.mul(&FactoredRat::from_parts(
        vars,
        sign,
        unit,
        Default::default(),
    ))?;
    Ok(FramingLimit { l_degree, limit })
}

/// `w_i -> L^i`, everything else fixed.
pub fn framing_images(vars: &Vars) -> Result<Vec<Monomial>> {
    let l = vars.index("L")?;
    Ok((0..vars.len())
        .map(|i| {
            let mut m = vars.one();
            match vars.group(i) {
                VarGroup::W => {
                    let idx: i32 = vars.names()[i][1..].parse().expect("w<index>");
                    m.0[l] = GRID * idx;
                }
                _ => m.0[i] = GRID,
            }
            m
        })
        .collect())
}

/// `(-y_b^(1/2))^|pi_a| / (-y_a^(1/2))^|pi_b|`.
pub fn expected_framing_limit(
    vars: &Vars,
    t: &PartitionTuple,
    a: usize,
    b: usize,
) -> Result<FactoredRat> {
    let na = t.parts[a - 1].size() as i32;
    let nb = t.parts[b - 1].size() as i32;
    let half_yb = vars.var(&format!("y{b}"), GRID / 2)?;
    let half_ya = vars.var(&format!("y{a}"), GRID / 2)?;
    let unit = half_yb.pow(na).div(&half_ya.pow(nb));
    let sign = if (na + nb) % 2 == 0 { 1 } else { -1 };
    Ok(FactoredRat::from_parts(
        vars,
        sign,
        unit,
        Default::default(),
    ))
}

/// Cached form of a weight.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightRecord {
    pub tuple: PartitionTuple,
    pub mu: usize,
    pub k: usize,
    pub weight: FactoredJson,
}

impl WeightRecord {
    pub fn compute(vars: &Vars, t: &PartitionTuple) -> Result<Self> {
        Ok(WeightRecord {
            tuple: t.clone(),
            mu: t.mu(),
            k: t.k_stat(),
            weight: np_weight(vars, t)?.to_json(),
        })
    }

    pub fn weight(&self) -> Result<FactoredRat> {
        FactoredRat::from_json(&self.weight)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::VarSet;
    use crate::partitions::{enumerate, enumerate_tuples, permutations4, Box4};

    fn sp(boxes: &[Box4]) -> SolidPartition {
        SolidPartition::new(boxes.to_vec()).unwrap()
    }

    fn single(boxes: &[Box4]) -> PartitionTuple {
        PartitionTuple::single(sp(boxes))
    }

    fn rnd() -> CompareMode {
        CompareMode::Random {
            trials: 8,
            seed: 11,
        }
    }

    #[test]
    fn dual_and_fixed_part() {
        let v = VarSet::standard(1, &[]);
        let c = KClass::new(v.poly("1 + t1").unwrap()).unwrap();
        assert_eq!(c.dual().poly(), &v.poly("1 + t1^-1").unwrap());
        assert_eq!(c.dual().dual(), c);
        assert_eq!(c.fixed_part(TorusMask::T).poly(), &v.poly("1").unwrap());
        let wy = KClass::new(v.poly("w1*y1").unwrap()).unwrap();
        assert!(wy
            .fixed_part(TorusMask::new(false, true, true).unwrap())
            .is_zero());
        assert!(TorusMask::new(false, false, false).is_err());
        assert!(KClass::new(v.poly("1/2*t1").unwrap()).is_err());
    }

    #[test]
    fn single_box_pre_class() {
        let v = VarSet::standard(1, &[]);
        let t = single(&[[0, 0, 0, 0]]);
        let pre = vertex_pre(&v, &t, 1, 1).unwrap();
        // 1 - (1 - a)(1 - b)(1 - c) = a + b + c - ab - ac - bc + abc
        let hand = v
            .poly(
                "t1^-1 + t2^-1 + t3^-1 - t1^-1*t2^-1 - t1^-1*t3^-1 - t2^-1*t3^-1 + t1^-1*t2^-1*t3^-1",
            )
            .unwrap();
        assert_eq!(pre.poly(), &hand);
        assert_eq!(pre.rank(), 1);
        assert!(vertex_pre(&v, &PartitionTuple::empty(1), 1, 1)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn single_box_component_and_weight() {
        let v = VarSet::standard(1, &[]);
        let t = single(&[[0, 0, 0, 0]]);
        let minus_v = vertex_component(&v, &t, 1, 1).unwrap().neg();
        let hand = v
            .poly(
                "y1 - t1^-1*t2^-1*t3^-1 + t1^-1*t2^-1 + t1^-1*t3^-1 + t2^-1*t3^-1 - t1^-1 - t2^-1 - t3^-1",
            )
            .unwrap();
        assert_eq!(minus_v.poly(), &hand);
        assert_eq!(minus_v.rank(), 0);
        assert_eq!(vertex_full(&v, &t).unwrap().neg(), minus_v);

        let w = np_weight(&v, &t).unwrap();
        let b = |s: &str| v.parse_monomial(s).unwrap();
        let expect = FactoredRat::from_brackets(
            &v,
            [
                (&b("t1*t2"), 1),
                (&b("t1*t3"), 1),
                (&b("t2*t3"), 1),
                (&b("y1"), 1),
                (&b("t1"), -1),
                (&b("t2"), -1),
                (&b("t3"), -1),
                (&b("t4"), -1),
            ],
        )
        .unwrap();
        for mode in [CompareMode::Exact, rnd()] {
            assert!(BracketSum::from(&w)
                .equals(&BracketSum::from(&expect), mode)
                .unwrap());
        }
        assert_eq!(
            np_weight(&v, &PartitionTuple::empty(1)).unwrap(),
            FactoredRat::one(&v)
        );
    }

    #[test]
    fn component_ranks() {
        let v = VarSet::standard(2, &[]);
        let t = PartitionTuple::new(vec![sp(&[[0, 0, 0, 0]]), SolidPartition::empty()]).unwrap();
        assert_eq!(vertex_component(&v, &t, 1, 2).unwrap().rank(), -1);
        assert_eq!(vertex_component(&v, &t, 2, 1).unwrap().rank(), 1);
        assert!(vertex_component(&v, &PartitionTuple::empty(2), 1, 2)
            .unwrap()
            .is_zero());
        assert!(vertex_pre(&v, &t, 0, 1).is_err());
        assert!(vertex_full(&VarSet::standard(1, &[]), &t).is_err());
    }

    #[test]
    fn full_vertex_has_rank_zero_and_no_fixed_terms() {
        for r in 1..=2 {
            let v = VarSet::standard(r, &[]);
            for n in 0..=3 {
                for t in enumerate_tuples(r, n).unwrap() {
                    let full = vertex_full(&v, &t).unwrap();
                    assert_eq!(full.rank(), 0);
                    for a in 1..=r {
                        for b in 1..=r {
                            let pre = vertex_pre(&v, &t, a, b).unwrap();
                            assert!(pre.fixed_part(TorusMask::FULL).is_zero());
                            assert_eq!(
                                vertex_component(&v, &t, a, b).unwrap().rank(),
                                t.parts[b - 1].size() as i64 - t.parts[a - 1].size() as i64
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn weight_matches_termwise_brackets() {
        let v = VarSet::standard(1, &[]);
        let up = single(&[[0, 0, 0, 0], [0, 0, 0, 1]]);
        assert_eq!(up.mu(), 1);
        for n in 1..=3 {
            for t in enumerate_tuples(1, n).unwrap() {
                let f = np_weight(&v, &t).unwrap().expand();
                let g = np_weight_termwise(&v, &t).unwrap();
                assert!(f.equals(&g, rnd()).unwrap(), "{}", t.to_json_string());
                if n <= 2 {
                    assert!(f.equals(&g, CompareMode::Exact).unwrap());
                }
            }
        }
    }

    #[test]
    fn lemma_parity_small() {
        let v = VarSet::standard(1, &[]);
        let up = sp(&[[0, 0, 0, 0], [0, 0, 0, 1]]);
        assert_eq!(fixed_pair_dimension(&up, &v), 1);
        for n in 0..=4 {
            for p in enumerate(4, n).unwrap() {
                let d = fixed_pair_dimension(&p, &v);
                assert_eq!(d, p.fixed_pairs() as i64);
                assert_eq!(d % 2, (p.k_stat() % 2) as i64);
            }
        }
    }

    #[test]
    fn permutation_invariance_small() {
        let v = VarSet::standard(1, &[]);
        let t = single(&[[0, 0, 0, 0]]);
        assert!(weight_permuted_equal(&v, &t, &[1, 0, 2, 3], rnd()).unwrap());
        for p in enumerate(4, 2).unwrap() {
            let t = PartitionTuple::single(p);
            for s in permutations4() {
                assert!(weight_permuted_equal(&v, &t, &s, rnd()).unwrap());
            }
        }
    }

    #[test]
    fn reduction_vanishes_off_the_hyperplane() {
        let v = VarSet::standard(1, &[]);
        let mut images = t_permutation_images(&v, &[0, 1, 2, 3]);
        images[v.index("y1").unwrap()] = v.parse_monomial("t4").unwrap();
        for n in 1..=3 {
            for p in enumerate(4, n).unwrap() {
                let w = np_weight(&v, &PartitionTuple::single(p.clone())).unwrap();
                let s = w.substitute(&v, &images).unwrap();
                assert_eq!(s.is_zero(), !p.is_plane(), "{:?}", p.boxes());
            }
        }
    }

    #[test]
    fn framing_limits_by_hand() {
        let v = VarSet::standard(2, &["L"]);
        let box1 = sp(&[[0, 0, 0, 0]]);
        let e = SolidPartition::empty();
        let t = PartitionTuple::new(vec![box1.clone(), e.clone()]).unwrap();
        let got = framing_limit(&v, &t, 1, 2).unwrap();
        assert_eq!(got.l_degree, 0);
        let y2 = v.parse_monomial("y2^1/2").unwrap();
        assert_eq!(
            got.limit,
            FactoredRat::from_parts(&v, -1, y2, Default::default())
        );

        let empty = framing_limit(&v, &PartitionTuple::empty(2), 1, 2).unwrap();
        assert_eq!(empty.limit, FactoredRat::one(&v));

        let both = PartitionTuple::new(vec![box1.clone(), box1]).unwrap();
        let got = framing_limit(&v, &both, 1, 2).unwrap();
        assert_eq!(got.l_degree, 0);
        assert_eq!(got.limit, expected_framing_limit(&v, &both, 1, 2).unwrap());
    }

    #[test]
    fn framing_limit_matches_expansion() {
        // leading L-coefficients of the expanded numerator and denominator
        let v = VarSet::standard(2, &["L"]);
        let l = v.index("L").unwrap();
        for t in enumerate_tuples(2, 1).unwrap() {
            let class = vertex_component(&v, &t, 1, 2)
                .unwrap()
                .add(&vertex_component(&v, &t, 2, 1).unwrap());
            let f = class
                .neg()
                .bracket()
                .unwrap()
                .substitute(&v, &framing_images(&v).unwrap())
                .unwrap()
                .expand();
            let (dn, ln) = f.num().leading_in(l).unwrap();
            let (dd, ld) = f.den().leading_in(l).unwrap();
            assert_eq!(dn, dd);
            let strip = |p: &LaurentPoly, d: i32| {
                let mut m = v.one();
                m.0[l] = -d;
                p.mul_monomial(&m)
            };
            let ratio = RatFunc::new(strip(&ln, dn), strip(&ld, dd)).unwrap();
            let expect = expected_framing_limit(&v, &t, 1, 2).unwrap().expand();
            assert!(ratio.equals(&expect, CompareMode::Exact).unwrap());
        }
    }

    #[test]
    fn weight_record_round_trip() {
        let v = VarSet::standard(1, &[]);
        let t = single(&[[0, 0, 0, 0], [0, 0, 0, 1]]);
        let rec = WeightRecord::compute(&v, &t).unwrap();
        assert_eq!((rec.mu, rec.k), (1, 1));
        let s = serde_json::to_string(&rec).unwrap();
        let back: WeightRecord = serde_json::from_str(&s).unwrap();
        assert_eq!(back, rec);
        assert_eq!(back.weight().unwrap(), np_weight(&v, &t).unwrap());
    }
}
