use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Stored exponents are multiples of this unit: a stored value `e` means the
/// nominal exponent `e / GRID`.
pub const GRID: i32 = 4;

/// Which torus a variable is weighted by. Fixed-part computations select
/// monomials that are trivial on a subset of these groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarGroup {
    T,
    W,
    Y,
    Aux,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarSet {
    names: Vec<String>,
    groups: Vec<VarGroup>,
}

pub type Vars = Arc<VarSet>;

impl VarSet {
    /// Builds a set from names. `t1..t3`, `w<i>` and `y<i>` are placed in their
    /// torus groups, anything else is auxiliary. `t4` is rejected: it is always
    /// eliminated as `(t1 t2 t3)^-1`.
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Vars> {
        let mut out = VarSet {
            names: Vec::new(),
            groups: Vec::new(),
        };
        for n in names {
            let n = n.as_ref();
            if n == "t4" {
                return Err(Error::Precondition(
                    "t4 is eliminated and cannot be a variable".into(),
                ));
            }
            if out.names.iter().any(|m| m == n) {
                return Err(Error::Precondition(format!("duplicate variable {n}")));
            }
            out.groups.push(group_of(n));
            out.names.push(n.to_string());
        }
        Ok(Arc::new(out))
    }

    /// `t1, t2, t3, w1..wr, y1..yr` followed by the given auxiliary names.
    pub fn standard(r: usize, aux: &[&str]) -> Vars {
        let mut names: Vec<String> = vec!["t1".into(), "t2".into(), "t3".into()];
        names.extend((1..=r).map(|i| format!("w{i}")));
        names.extend((1..=r).map(|i| format!("y{i}")));
        names.extend(aux.iter().map(|s| s.to_string()));
        VarSet::new(&names).expect("standard variable names are distinct")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn group(&self, i: usize) -> VarGroup {
        self.groups[i]
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Number of framing variables `w1..wr` present.
    pub fn rank(&self) -> usize {
        self.groups.iter().filter(|g| **g == VarGroup::W).count()
    }

    pub fn one(&self) -> Monomial {
        Monomial::one(self.len())
    }

    /// The monomial `name^(stored / GRID)`.
    pub fn var(&self, name: &str, stored: i32) -> Result<Monomial> {
        let mut m = self.one();
        m.0[self.index(name)?] = stored;
        Ok(m)
    }

    /// `t1^a t2^b t3^c t4^d` with `t4` eliminated; arguments are nominal
    /// integer exponents.
    pub fn t_monomial(&self, exps: [i32; 4]) -> Monomial {
        let mut m = self.one();
        for k in 0..3 {
            let idx = self
                .index(["t1", "t2", "t3"][k])
                .expect("t variables present");
            m.0[idx] = GRID * (exps[k] - exps[3]);
        }
        m
    }

    /// Parses a monomial written as `name^e * name^e ...` with rational
    /// exponents (e.g. `t1^1/2*y1`). The empty string and `1` are the trivial
    /// monomial; `t4` is expanded.
    pub fn parse_monomial(&self, s: &str) -> Result<Monomial> {
        let mut m = self.one();
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(m);
        }
        for factor in s.split('*') {
            let factor = factor.trim();
            let (name, exp) = match factor.split_once('^') {
                Some((n, e)) => (n.trim(), parse_quarter(e.trim())?),
                None => (factor, GRID),
            };
            if name == "t4" {
                for t in ["t1", "t2", "t3"] {
                    m.0[self.index(t)?] -= exp;
                }
            } else {
                m.0[self.index(name)?] += exp;
            }
        }
        Ok(m)
    }

    /// Substitution images sending each variable to the variable of the same
    /// name in `target`; with `target == self` this is the identity.
    pub fn embedding(&self, target: &VarSet) -> Result<Vec<Monomial>> {
        self.names.iter().map(|n| target.var(n, GRID)).collect()
    }

    pub fn check(&self, other: &VarSet) -> Result<()> {
        if std::ptr::eq(self, other) || self == other {
            Ok(())
        } else {
            Err(Error::ArityMismatch(format!(
                "{:?} vs {:?}",
                self.names, other.names
            )))
        }
    }
}

fn group_of(name: &str) -> VarGroup {
    let tail_is_index = |p: &str| {
        name.strip_prefix(p)
            .map(|rest| !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()))
            .unwrap_or(false)
    };
    match name {
        "t1" | "t2" | "t3" => VarGroup::T,
        _ if tail_is_index("w") => VarGroup::W,
        _ if tail_is_index("y") => VarGroup::Y,
        _ => VarGroup::Aux,
    }
}

fn parse_quarter(e: &str) -> Result<i32> {
    let bad = || Error::Parse(format!("bad exponent `{e}`"));
    let e = e.trim_start_matches('(').trim_end_matches(')');
    let (num, den) = match e.split_once('/') {
        Some((n, d)) => (
            n.trim().parse::<i32>().map_err(|_| bad())?,
            d.trim().parse::<i32>().map_err(|_| bad())?,
        ),
        None => (e.parse::<i32>().map_err(|_| bad())?, 1),
    };
    if den == 0 || (num * GRID) % den != 0 {
        return Err(Error::GridViolation(e.to_string()));
    }
    Ok(num * GRID / den)
}

/// Exponent vector in quarter units.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub SmallVec<[i32; 8]>);

impl Monomial {
    pub fn one(arity: usize) -> Self {
        Monomial(SmallVec::from_elem(0, arity))
    }

    pub fn from_stored(exps: &[i32]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn exps(&self) -> &[i32] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.arity(), other.arity());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.arity(), other.arity());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn inv(&self) -> Monomial {
        Monomial(self.0.iter().map(|e| -e).collect())
    }

    pub fn pow(&self, k: i32) -> Monomial {
        Monomial(self.0.iter().map(|e| e * k).collect())
    }

    /// Square root, failing if any stored exponent is odd.
    pub fn sqrt(&self) -> Result<Monomial> {
        if self.0.iter().any(|e| e % 2 != 0) {
            return Err(Error::GridViolation(format!("sqrt of {self:?}")));
        }
        Ok(Monomial(self.0.iter().map(|e| e / 2).collect()))
    }

    /// Canonical bracket orientation: first nonzero stored exponent positive.
    pub fn is_canonical(&self) -> bool {
        self.0.iter().find(|&&e| e != 0).is_none_or(|&e| e > 0)
    }

    /// Returns the canonical representative of `{m, m^-1}` and whether it
    /// was flipped.
    pub fn canonical(&self) -> (Monomial, bool) {
        if self.is_canonical() {
            (self.clone(), false)
        } else {
            (self.inv(), true)
        }
    }

    /// Total degree in nominal units, as a bound for identity testing.
    pub fn degree_bound(&self) -> u64 {
        self.0.iter().map(|e| e.unsigned_abs() as u64).sum()
    }

    pub fn display<'a>(&'a self, vars: &'a VarSet) -> impl fmt::Display + 'a {
        MonomialDisplay { m: self, vars }
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

struct MonomialDisplay<'a> {
    m: &'a Monomial,
    vars: &'a VarSet,
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            let name = &self.vars.names()[i];
            if e == GRID {
                write!(f, "{name}")?;
            } else if e % GRID == 0 {
                write!(f, "{name}^{}", e / GRID)?;
            } else {
                let g = num_integer::gcd(e, GRID);
                write!(f, "{name}^({}/{})", e / g, GRID / g)?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_layout() {
        let v = VarSet::standard(2, &["q"]);
        assert_eq!(v.names(), &["t1", "t2", "t3", "w1", "w2", "y1", "y2", "q"]);
        assert_eq!(v.group(3), VarGroup::W);
        assert_eq!(v.group(6), VarGroup::Y);
        assert_eq!(v.group(7), VarGroup::Aux);
        assert_eq!(v.rank(), 2);
    }

    #[test]
    fn t4_is_not_a_variable() {
        assert!(VarSet::new(&["t1", "t4"]).is_err());
        let v = VarSet::standard(1, &[]);
        let t4 = v.parse_monomial("t4").unwrap();
        assert_eq!(t4.exps(), &[-4, -4, -4, 0, 0]);
        assert_eq!(v.t_monomial([0, 0, 0, 1]), t4);
    }

    #[test]
    fn parse_and_display() {
        let v = VarSet::standard(1, &[]);
        let m = v.parse_monomial("t1^1/2*y1^-1*t2^(3/4)").unwrap();
        assert_eq!(m.exps(), &[2, 3, 0, 0, -4]);
        assert_eq!(m.display(&v).to_string(), "t1^(1/2)*t2^(3/4)*y1^-1");
        assert!(matches!(
            v.parse_monomial("t1^1/3"),
            Err(Error::GridViolation(_))
        ));
    }

    #[test]
    fn canonical_orientation() {
        let m = Monomial::from_stored(&[0, -4, 4]);
        let (c, flipped) = m.canonical();
        assert!(flipped);
        assert_eq!(c.exps(), &[0, 4, -4]);
        assert!(Monomial::one(3).is_canonical());
    }

    #[test]
    fn sqrt_requires_even() {
        assert!(Monomial::from_stored(&[2, 4]).sqrt().is_ok());
        assert!(Monomial::from_stored(&[1]).sqrt().is_err());
    }
}
