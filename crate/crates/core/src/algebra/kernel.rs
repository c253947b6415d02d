//! Numerators of bracket sums over a common denominator.
//!
//! Each term contributes `poly * prod [m]^k` over the brackets it is
//! missing from the common denominator. Brackets shared by several terms are
//! factored out first (a Horner scheme on the bracket multisets), so the
//! large products are formed once per group instead of once per term. The
//! packed kernel stores monomials as `u128` keys with `i128` coefficients and
//! is used whenever the arity and coefficient sizes allow.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rustc_hash::FxHashMap;

use super::bracket::bracket_monomial;
use super::poly::LaurentPoly;
use super::vars::{Monomial, Vars};
use crate::error::{Error, Result};

/// A term: polynomial coefficient and the brackets it must be multiplied by.
pub(crate) type Job = (LaurentPoly, BTreeMap<Monomial, u32>);

/// Largest intermediate numerator, in terms, before giving up.
pub(crate) const MAX_TERMS: usize = 1 << 24;

enum Abort {
    Overflow,
    TooLarge,
}

type Step<T> = std::result::Result<T, Abort>;

trait Accum: Sized {
    fn add(self, other: Self) -> Step<Self>;
    fn mul_bracket(&self, m: &Monomial) -> Step<Self>;
}

/// `sum_i p_i prod_m [m]^(k_im)` with shared brackets factored out.
fn horner<A: Accum>(mut jobs: Vec<(A, BTreeMap<Monomial, u32>)>) -> Step<Option<A>> {
    if jobs.is_empty() {
        return Ok(None);
    }
    if jobs.len() == 1 {
        let (mut p, ks) = jobs.pop().expect("one job");
        for (m, k) in ks {
            for _ in 0..k {
                p = p.mul_bracket(&m)?;
            }
        }
        return Ok(Some(p));
    }
    // the bracket used by the most terms
    let mut counts: BTreeMap<&Monomial, usize> = BTreeMap::new();
    for (_, ks) in &jobs {
        for (m, &k) in ks {
            if k > 0 {
                *counts.entry(m).or_insert(0) += 1;
            }
        }
    }
    let best = counts
        .iter()
        .max_by_key(|(_, &c)| c)
        .map(|(m, &c)| ((*m).clone(), c));
    match best {
        Some((m, c)) if c >= 2 => {
            let (mut with, without): (Vec<_>, Vec<_>) =
                jobs.into_iter().partition(|(_, ks)| ks.get(&m).copied().unwrap_or(0) > 0);
            for (_, ks) in with.iter_mut() {
                let k = ks.get_mut(&m).expect("selected");
                *k -= 1;
                if *k == 0 {
                    ks.remove(&m);
                }
            }
            let inner = horner(with)?.expect("nonempty").mul_bracket(&m)?;
            match horner(without)? {
                Some(rest) => inner.add(rest).map(Some),
                None => Ok(Some(inner)),
            }
        }
        _ => {
            let mut acc: Option<A> = None;
            for job in jobs {
                let t = horner(vec![job])?.expect("nonempty");
                acc = Some(match acc {
                    None => t,
                    Some(a) => a.add(t)?,
                });
            }
            Ok(acc)
        }
    }
}

struct Generic {
    vars: Vars,
    poly: LaurentPoly,
}

impl Accum for Generic {
    fn add(self, other: Self) -> Step<Self> {
        Ok(Generic {
            poly: &self.poly + &other.poly,
            vars: self.vars,
        })
    }
    fn mul_bracket(&self, m: &Monomial) -> Step<Self> {
        if 2 * self.poly.len() > MAX_TERMS {
            return Err(Abort::TooLarge);
        }
        let b = bracket_monomial(&self.vars, m).expect("grid checked on insertion");
        Ok(Generic {
            poly: &self.poly * &b,
            vars: self.vars.clone(),
        })
    }
}

const FIELD_BITS: u32 = 16;
const OFFSET: i64 = 1 << 15;
const MAX_ARITY: usize = 128 / FIELD_BITS as usize;

struct Packed {
    terms: FxHashMap<u128, i128>,
}

/// Signed shift added to a packed key to multiply by a monomial.
fn delta(exps: &[i32]) -> u128 {
    let mut d: i128 = 0;
    for (i, &e) in exps.iter().enumerate() {
        d += (e as i128) << (FIELD_BITS * i as u32);
    }
    d as u128
}

fn pack(exps: &[i32]) -> Option<u128> {
    let mut k: u128 = 0;
    for (i, &e) in exps.iter().enumerate() {
        let v = e as i64 + OFFSET;
        if !(0..1 << FIELD_BITS).contains(&v) {
            return None;
        }
        k |= (v as u128) << (FIELD_BITS * i as u32);
    }
    Some(k)
}

impl Accum for Packed {
    fn add(mut self, other: Self) -> Step<Self> {
        if self.terms.len() + other.terms.len() > MAX_TERMS {
            return Err(Abort::TooLarge);
        }
        for (k, c) in other.terms {
            let e = self.terms.entry(k).or_insert(0);
            *e = e.checked_add(c).ok_or(Abort::Overflow)?;
            if *e == 0 {
                self.terms.remove(&k);
            }
        }
        Ok(self)
    }

    fn mul_bracket(&self, m: &Monomial) -> Step<Self> {
        if 2 * self.terms.len() > MAX_TERMS {
            return Err(Abort::TooLarge);
        }
        let half = m.sqrt().expect("grid checked on insertion");
        let up = delta(half.exps());
        let down = delta(half.inv().exps());
        let mut out: FxHashMap<u128, i128> =
            FxHashMap::with_capacity_and_hasher(self.terms.len() * 2, Default::default());
        for (&k, &c) in &self.terms {
            let a = out.entry(k.wrapping_add(up)).or_insert(0);
            *a = a.checked_add(c).ok_or(Abort::Overflow)?;
            let b = out.entry(k.wrapping_add(down)).or_insert(0);
            *b = b.checked_sub(c).ok_or(Abort::Overflow)?;
        }
        out.retain(|_, c| *c != 0);
        Ok(Packed { terms: out })
    }
}

/// Rescales every coefficient by the lcm of the denominators.
fn integral_scale(jobs: &[Job]) -> BigInt {
    let mut l = BigInt::one();
    for (p, _) in jobs {
        for (_, c) in p.terms() {
            l = l.lcm(c.denom());
        }
    }
    l
}

fn packed_jobs(jobs: &[Job]) -> Option<Vec<(Packed, BTreeMap<Monomial, u32>)>> {
    let arity = jobs.first()?.0.vars().len();
    if arity > MAX_ARITY {
        return None;
    }
    let scale = BigRational::from_integer(integral_scale(jobs));
    let mut out = Vec::with_capacity(jobs.len());
    for (p, ks) in jobs {
        // every product stays within poly exponents plus the bracket half-widths
        let mut reach = vec![0i64; arity];
        for (m, &k) in ks {
            for (r, e) in reach.iter_mut().zip(m.exps()) {
                *r += (e.unsigned_abs() as i64 / 2) * k as i64;
            }
        }
        let mut terms = FxHashMap::default();
        for (m, c) in p.terms() {
            if m.exps().iter().zip(&reach).any(|(e, r)| (*e as i64).abs() + r >= OFFSET) {
                return None;
            }
            let c = c * &scale;
            let v = c.to_integer().to_i128()?;
            terms.insert(pack(m.exps())?, v);
        }
        out.push((Packed { terms }, ks.clone()));
    }
    Some(out)
}

fn too_large() -> Error {
    Error::ResourceGuard(format!(
        "exact numerator exceeds {MAX_TERMS} terms; use randomized comparison"
    ))
}

/// Whether the combined numerator vanishes.
pub(crate) fn numerator_is_zero(jobs: Vec<Job>) -> Result<bool> {
    if jobs.is_empty() {
        return Ok(true);
    }
    if let Some(packed) = packed_jobs(&jobs) {
        match horner(packed) {
            Ok(p) => return Ok(p.is_none_or(|p| p.terms.is_empty())),
            Err(Abort::TooLarge) => return Err(too_large()),
            Err(Abort::Overflow) => {}
        }
    }
    let vars = jobs[0].0.vars().clone();
    Ok(numerator(&vars, jobs)?.is_zero())
}

/// The combined numerator as a polynomial.
pub(crate) fn numerator(vars: &Vars, jobs: Vec<Job>) -> Result<LaurentPoly> {
    let generic = jobs
        .into_iter()
        .map(|(p, ks)| {
            (
                Generic {
                    vars: vars.clone(),
                    poly: p,
                },
                ks,
            )
        })
        .collect();
    match horner(generic) {
        Ok(g) => Ok(g.map_or_else(|| LaurentPoly::zero(vars), |g| g.poly)),
        Err(_) => Err(too_large()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::VarSet;

    fn jobs(v: &Vars, spec: &[(&str, &[(&str, u32)])]) -> Vec<Job> {
        spec.iter()
            .map(|(p, ks)| {
                (
                    v.poly(p).unwrap(),
                    ks.iter()
                        .map(|(m, k)| (v.parse_monomial(m).unwrap(), *k))
                        .collect(),
                )
            })
            .collect()
    }

    #[test]
    fn packed_and_generic_agree() {
        let v = VarSet::new(&["a", "b", "c"]).unwrap();
        let js = jobs(
            &v,
            &[
                ("1/2*a - b", &[("a", 2), ("a*b", 1), ("c^1/2", 1)]),
                ("3", &[("a", 1), ("b", 1), ("c^1/2", 1)]),
                ("c", &[("a*b", 1), ("b", 2)]),
            ],
        );
        let g = numerator(&v, js.clone()).unwrap();
        let scale = BigRational::from_integer(integral_scale(&js));
        let p = horner(packed_jobs(&js).unwrap()).ok().unwrap().unwrap();
        let mut from_packed = LaurentPoly::zero(&v);
        for (k, c) in p.terms {
            let exps: Vec<i32> = (0..3)
                .map(|i| (((k >> (FIELD_BITS * i)) & 0xffff) as i64 - OFFSET) as i32)
                .collect();
            from_packed.add_term(Monomial::from_stored(&exps), BigRational::from_integer(c.into()));
        }
        assert_eq!(from_packed, g.scale(&scale));
        assert!(!numerator_is_zero(js).unwrap());
    }

    #[test]
    fn cancellation_is_detected() {
        let v = VarSet::new(&["a", "b"]).unwrap();
        // [a][b] - [b][a] + a*[a] - a*[a]
        let js = jobs(
            &v,
            &[
                ("1", &[("a", 1), ("b", 1)]),
                ("-1", &[("b", 1), ("a", 1)]),
                ("a", &[("a", 1)]),
                ("-a", &[("a", 1)]),
            ],
        );
        assert!(numerator_is_zero(js.clone()).unwrap());
        assert!(numerator(&v, js).unwrap().is_zero());
    }
}
