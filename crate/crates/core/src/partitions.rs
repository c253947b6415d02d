//! Finite downward-closed box sets in `Z_{>=0}^4` and their statistics.
//!
//! Lower-dimensional partitions use the same four-coordinate [`Box4`] with
//! trailing zeros: `dim = 2` gives Young diagrams, `dim = 3` plane
//! partitions and `dim = 4` solid partitions.

use std::collections::{BTreeSet, HashSet};

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::algebra::{LaurentPoly, Vars};
use crate::error::{Error, Result};

/// Default enumeration ceiling for four-dimensional partitions.
pub const DEFAULT_SOLID_CEILING: usize = 8;
/// Default ceiling for lower dimensions.
pub const DEFAULT_LOW_DIM_CEILING: usize = 16;

pub type Box4 = [u32; 4];

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "PartitionJson", into = "PartitionJson")]
pub struct SolidPartition {
    boxes: Vec<Box4>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct PartitionJson {
    boxes: Vec<Box4>,
}

impl TryFrom<PartitionJson> for SolidPartition {
    type Error = Error;
    fn try_from(j: PartitionJson) -> Result<Self> {
        SolidPartition::new(j.boxes)
    }
}

impl From<SolidPartition> for PartitionJson {
    fn from(p: SolidPartition) -> Self {
        PartitionJson { boxes: p.boxes }
    }
}

/// Downward closure, checked through the single-step predecessors.
pub fn is_valid(boxes: &[Box4]) -> bool {
    let set: HashSet<&Box4> = boxes.iter().collect();
    if set.len() != boxes.len() {
        return false;
    }
    boxes.iter().all(|b| {
        (0..4).all(|k| {
            b[k] == 0 || {
                let mut p = *b;
                p[k] -= 1;
                set.contains(&p)
            }
        })
    })
}

impl SolidPartition {
    pub fn empty() -> Self {
        SolidPartition { boxes: Vec::new() }
    }

    /// Validates and canonicalizes (sorts) a box list.
    pub fn new(mut boxes: Vec<Box4>) -> Result<Self> {
        if !is_valid(&boxes) {
            return Err(Error::Precondition(format!(
                "not a downward-closed box set: {boxes:?}"
            )));
        }
        boxes.sort_unstable();
        Ok(SolidPartition { boxes })
    }

    pub fn boxes(&self) -> &[Box4] {
        &self.boxes
    }

    pub fn size(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    /// Contained in the hyperplane `a4 = 0`.
    pub fn is_plane(&self) -> bool {
        self.boxes.iter().all(|b| b[3] == 0)
    }

    /// `sum t1^a1 t2^a2 t3^a3 t4^a4` with `t4 = (t1 t2 t3)^-1`.
    pub fn character(&self, vars: &Vars) -> LaurentPoly {
        let mut p = LaurentPoly::zero(vars);
        for b in &self.boxes {
            let e = [b[0] as i32, b[1] as i32, b[2] as i32, b[3] as i32];
            p.add_term(vars.t_monomial(e), BigRational::one());
        }
        p
    }

    /// Boxes `(i,i,i,j)` with `j > i`.
    pub fn mu(&self) -> usize {
        self.boxes
            .iter()
            .filter(|b| b[0] == b[1] && b[1] == b[2] && b[3] > b[0])
            .count()
    }

    /// Boxes `(i,j,k,l)` with `l != min(i,j,k)`.
    pub fn k_stat(&self) -> usize {
        self.boxes
            .iter()
            .filter(|b| b[3] != b[0].min(b[1]).min(b[2]))
            .count()
    }

    /// Ordered pairs `(b, b')` with `b' - b = (d, d, d, d + 1)` for some `d`.
    pub fn fixed_pairs(&self) -> usize {
        let mut n = 0;
        for b in &self.boxes {
            for c in &self.boxes {
                let d = |k: usize| c[k] as i64 - b[k] as i64;
                if d(0) == d(1) && d(1) == d(2) && d(3) == d(0) + 1 {
                    n += 1;
                }
            }
        }
        n
    }

    /// Moves coordinate `k` to position `sigma[k]` (0-based).
    pub fn permute(&self, sigma: &[usize; 4]) -> SolidPartition {
        let mut boxes: Vec<Box4> = self
            .boxes
            .iter()
            .map(|b| {
                let mut out = [0; 4];
                for k in 0..4 {
                    out[sigma[k]] = b[k];
                }
                out
            })
            .collect();
        boxes.sort_unstable();
        SolidPartition { boxes }
    }

    /// Boxes that can be added keeping the set downward closed, restricted to
    /// the first `dim` coordinates.
    fn addable(&self, dim: usize) -> BTreeSet<Box4> {
        let set: HashSet<&Box4> = self.boxes.iter().collect();
        let mut out = BTreeSet::new();
        if self.boxes.is_empty() {
            out.insert([0; 4]);
            return out;
        }
        for b in &self.boxes {
            for k in 0..dim {
                let mut c = *b;
                c[k] += 1;
                if set.contains(&c) {
                    continue;
                }
                let ok = (0..4).all(|j| {
                    c[j] == 0 || {
                        let mut p = c;
                        p[j] -= 1;
                        set.contains(&p)
                    }
                });
                if ok {
                    out.insert(c);
                }
            }
        }
        out
    }
}

/// All `dim`-dimensional partitions of size `n`, sorted by box list.
pub fn enumerate(dim: usize, n: usize) -> Result<Vec<SolidPartition>> {
    let ceiling = if dim == 4 {
        DEFAULT_SOLID_CEILING
    } else {
        DEFAULT_LOW_DIM_CEILING
    };
    enumerate_with_ceiling(dim, n, ceiling)
}

pub fn enumerate_with_ceiling(dim: usize, n: usize, ceiling: usize) -> Result<Vec<SolidPartition>> {
    Ok(enumerate_levels(dim, n, ceiling)?
        .pop()
        .expect("level n present"))
}

/// Levels `0..=n` of the growth process.
pub fn enumerate_levels(dim: usize, n: usize, ceiling: usize) -> Result<Vec<Vec<SolidPartition>>> {
    if !(1..=4).contains(&dim) {
        return Err(Error::Precondition(format!("dimension {dim} not in 1..=4")));
    }
    if n > ceiling {
        return Err(Error::ResourceGuard(format!(
            "size {n} exceeds the enumeration ceiling {ceiling} for dimension {dim}"
        )));
    }
    let mut levels = vec![vec![SolidPartition::empty()]];
    for _ in 0..n {
        let prev = levels.last().expect("nonempty");
        let mut next: BTreeSet<SolidPartition> = BTreeSet::new();
        for p in prev {
            for b in p.addable(dim) {
                let mut boxes = p.boxes.clone();
                boxes.push(b);
                boxes.sort_unstable();
                next.insert(SolidPartition { boxes });
            }
        }
        levels.push(next.into_iter().collect());
    }
    Ok(levels)
}

/// Ordered `r`-tuple of solid partitions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartitionTuple {
    pub parts: Vec<SolidPartition>,
}

impl PartitionTuple {
    pub fn new(parts: Vec<SolidPartition>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Precondition("a tuple needs r >= 1 parts".into()));
        }
        Ok(PartitionTuple { parts })
    }

    pub fn single(p: SolidPartition) -> Self {
        PartitionTuple { parts: vec![p] }
    }

    pub fn empty(r: usize) -> Self {
        PartitionTuple {
            parts: vec![SolidPartition::empty(); r],
        }
    }

    pub fn rank(&self) -> usize {
        self.parts.len()
    }

    pub fn size(&self) -> usize {
        self.parts.iter().map(SolidPartition::size).sum()
    }

    pub fn mu(&self) -> usize {
        self.parts.iter().map(SolidPartition::mu).sum()
    }

    pub fn k_stat(&self) -> usize {
        self.parts.iter().map(SolidPartition::k_stat).sum()
    }

    pub fn is_plane(&self) -> bool {
        self.parts.iter().all(SolidPartition::is_plane)
    }

    pub fn permute(&self, sigma: &[usize; 4]) -> PartitionTuple {
        PartitionTuple {
            parts: self.parts.iter().map(|p| p.permute(sigma)).collect(),
        }
    }

    /// Canonical JSON, used as a cache key.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("tuples serialize")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let t: PartitionTuple = serde_json::from_str(s)?;
        PartitionTuple::new(t.parts)
    }
}

/// All `r`-tuples of solid partitions of total size `n`, by composition of
/// `n` and then lexicographically within each slot.
pub fn enumerate_tuples(r: usize, n: usize) -> Result<Vec<PartitionTuple>> {
    if r == 0 {
        return Err(Error::Precondition("rank must be at least 1".into()));
    }
    let levels = enumerate_levels(4, n, DEFAULT_SOLID_CEILING)?;
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(r);
    fill(&levels, r, n, &mut current, &mut out);
    Ok(out)
}

fn fill(
    levels: &[Vec<SolidPartition>],
    r: usize,
    remaining: usize,
    current: &mut Vec<SolidPartition>,
    out: &mut Vec<PartitionTuple>,
) {
    if current.len() + 1 == r {
        for p in &levels[remaining] {
            current.push(p.clone());
            out.push(PartitionTuple {
                parts: current.clone(),
            });
            current.pop();
        }
        return;
    }
    for k in (0..=remaining).rev() {
        for p in &levels[k] {
            current.push(p.clone());
            fill(levels, r, remaining - k, current, out);
            current.pop();
        }
    }
}

/// All 24 permutations of four coordinates.
pub fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let distinct = (0..4).all(|i| (0..i).all(|j| p[i] != p[j]));
                    if distinct {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::VarSet;

    fn sp(boxes: &[Box4]) -> SolidPartition {
        SolidPartition::new(boxes.to_vec()).unwrap()
    }

    /// Independent count: every subset of the box `[0,n)^dim` of size `n`
    /// that is downward closed.
    fn brute_force_count(dim: usize, n: usize) -> usize {
        let mut cells = Vec::new();
        let side = n as u32;
        let mut idx = [0u32; 4];
        loop {
            let sum: u32 = idx.iter().sum();
            if sum < side {
                cells.push(idx);
            }
            let mut k = 0;
            loop {
                if k == dim {
                    break;
                }
                idx[k] += 1;
                if idx[k] < side {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == dim {
                break;
            }
        }
        // a box with coordinate sum s has s boxes below it
        let mut count = 0;
        let mut chosen = Vec::new();
        fn rec(
            cells: &[Box4],
            start: usize,
            left: usize,
            chosen: &mut Vec<Box4>,
            count: &mut usize,
        ) {
            if left == 0 {
                if is_valid(chosen) {
                    *count += 1;
                }
                return;
            }
            for i in start..cells.len() {
                chosen.push(cells[i]);
                rec(cells, i + 1, left - 1, chosen, count);
                chosen.pop();
            }
        }
        rec(&cells, 0, n, &mut chosen, &mut count);
        count
    }

    #[test]
    fn validity_examples() {
        assert!(is_valid(&[]));
        assert!(is_valid(&[[0, 0, 0, 0], [0, 0, 0, 1]]));
        assert!(!is_valid(&[[1, 0, 0, 0]]));
        assert!(!is_valid(&[[0, 0, 0, 0], [0, 0, 0, 0]]));
    }

    #[test]
    fn small_solid_counts_match_brute_force() {
        for n in 0..=4 {
            assert_eq!(
                enumerate(4, n).unwrap().len(),
                brute_force_count(4, n),
                "n = {n}"
            );
        }
        assert_eq!(enumerate(4, 2).unwrap().len(), 4);
        assert_eq!(enumerate(4, 3).unwrap().len(), 10);
        assert_eq!(enumerate(4, 0).unwrap(), vec![SolidPartition::empty()]);
    }

    #[test]
    fn enumeration_is_canonical_and_sorted() {
        let ps = enumerate(4, 4).unwrap();
        assert!(ps.windows(2).all(|w| w[0] < w[1]));
        for p in &ps {
            assert!(is_valid(p.boxes()));
            assert!(p.boxes().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn ceiling_is_enforced() {
        assert!(matches!(enumerate(4, 9), Err(Error::ResourceGuard(_))));
        assert!(enumerate_with_ceiling(4, 3, 2).is_err());
    }

    #[test]
    fn tuple_counts() {
        assert_eq!(enumerate_tuples(2, 1).unwrap().len(), 2);
        assert_eq!(enumerate_tuples(2, 2).unwrap().len(), 9);
        assert_eq!(enumerate_tuples(1, 3).unwrap().len(), 10);
        let t = enumerate_tuples(3, 2).unwrap();
        // compositions of 2 into 3 parts: three (2,0,0)-type with 4 each and
        // three (1,1,0)-type with 1 each
        assert_eq!(t.len(), 15);
        assert!(t.iter().all(|x| x.size() == 2 && x.rank() == 3));
    }

    #[test]
    fn character_examples() {
        let v = VarSet::standard(1, &[]);
        assert!(SolidPartition::empty().character(&v).is_zero());
        assert!(sp(&[[0, 0, 0, 0]]).character(&v).is_one());
        let c = sp(&[[0, 0, 0, 0], [0, 0, 0, 1]]).character(&v);
        let expect = &LaurentPoly::one(&v) + &v.poly("t1^-1*t2^-1*t3^-1").unwrap();
        assert_eq!(c, expect);
    }

    #[test]
    fn statistics_examples() {
        let up = sp(&[[0, 0, 0, 0], [0, 0, 0, 1]]);
        let side = sp(&[[0, 0, 0, 0], [1, 0, 0, 0]]);
        assert_eq!(up.mu(), 1);
        assert_eq!(side.mu(), 0);
        assert_eq!(sp(&[[0, 0, 0, 0]]).k_stat(), 0);
        assert_eq!(up.k_stat(), 1);
        assert_eq!(side.k_stat(), 0);
        assert_eq!(sp(&[[0, 0, 0, 0]]).fixed_pairs(), 0);
        assert_eq!(up.fixed_pairs(), 1);
        assert_eq!(side.fixed_pairs(), 0);
        for p in enumerate(3, 5).unwrap() {
            assert_eq!(p.mu(), 0);
        }
    }

    #[test]
    fn permutation_examples() {
        let side = sp(&[[0, 0, 0, 0], [1, 0, 0, 0]]);
        assert_eq!(side.permute(&[0, 1, 2, 3]), side);
        assert_eq!(
            side.permute(&[3, 1, 2, 0]),
            sp(&[[0, 0, 0, 0], [0, 0, 0, 1]])
        );
        let p = enumerate(4, 4).unwrap()[7].clone();
        let (s, t) = ([1, 2, 3, 0], [2, 0, 3, 1]);
        let st: [usize; 4] = std::array::from_fn(|k| t[s[k]]);
        assert_eq!(p.permute(&s).permute(&t), p.permute(&st));
        assert_eq!(permutations4().len(), 24);
    }

    #[test]
    fn json_shape() {
        let t = PartitionTuple::single(sp(&[[0, 0, 0, 0]]));
        assert_eq!(t.to_json_string(), r#"{"parts":[{"boxes":[[0,0,0,0]]}]}"#);
        assert_eq!(
            PartitionTuple::from_json_str(&t.to_json_string()).unwrap(),
            t
        );
        assert!(PartitionTuple::from_json_str(r#"{"parts":[{"boxes":[[1,0,0,0]]}]}"#).is_err());
        assert!(PartitionTuple::from_json_str(r#"{"parts":[]}"#).is_err());
    }
}
