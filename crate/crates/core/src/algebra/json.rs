//! JSON forms of the algebra types. Terms are written in monomial order and
//! coefficients as canonical `p/q` strings, so serialization round-trips
//! byte for byte.

use serde::{Deserialize, Serialize};

use super::bracket::{Brackets, FactoredRat, Push};
use super::poly::{parse_rational, LaurentPoly};
use super::ratfunc::RatFunc;
use super::vars::{Monomial, VarSet, Vars, GRID};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    pub exp: Vec<i32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub vars: Vec<String>,
    pub grid: i32,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatFuncJson {
    pub num: PolyJson,
    pub den: PolyJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorJson {
    pub exp: Vec<i32>,
    pub mult: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredJson {
    pub vars: Vec<String>,
    pub grid: i32,
    pub zero: bool,
    pub sign: i8,
    pub unit: Vec<i32>,
    pub factors: Vec<FactorJson>,
}

fn vars_from(names: &[String], grid: i32) -> Result<Vars> {
    if grid != GRID {
        return Err(Error::Parse(format!("unsupported grid {grid}")));
    }
    VarSet::new(names)
}

fn monomial_from(vars: &Vars, exp: &[i32]) -> Result<Monomial> {
    if exp.len() != vars.len() {
        return Err(Error::ArityMismatch(format!(
            "exponent vector of length {} for {} variables",
            exp.len(),
            vars.len()
        )));
    }
    Ok(Monomial::from_stored(exp))
}

impl LaurentPoly {
    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            vars: self.vars().names().to_vec(),
            grid: GRID,
            terms: self
                .terms()
                .map(|(m, c)| TermJson {
                    coeff: c.to_string(),
                    exp: m.exps().to_vec(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &PolyJson) -> Result<Self> {
        let vars = vars_from(&j.vars, j.grid)?;
        Self::from_json_in(&vars, j)
    }

    /// Parses into an existing ring, which must have the same variables.
    pub fn from_json_in(vars: &Vars, j: &PolyJson) -> Result<Self> {
        if vars.names() != j.vars.as_slice() {
            return Err(Error::ArityMismatch(format!("{:?}", j.vars)));
        }
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            terms.push((monomial_from(vars, &t.exp)?, parse_rational(&t.coeff)?));
        }
        LaurentPoly::from_terms(vars, terms)
    }
}

impl RatFunc {
    pub fn to_json(&self) -> RatFuncJson {
        RatFuncJson {
            num: self.num().to_json(),
            den: self.den().to_json(),
        }
    }

    pub fn from_json(j: &RatFuncJson) -> Result<Self> {
        let vars = vars_from(&j.num.vars, j.num.grid)?;
        RatFunc::new(
            LaurentPoly::from_json_in(&vars, &j.num)?,
            LaurentPoly::from_json_in(&vars, &j.den)?,
        )
    }
}

impl FactoredRat {
    pub fn to_json(&self) -> FactoredJson {
        FactoredJson {
            vars: self.vars().names().to_vec(),
            grid: GRID,
            zero: self.is_zero(),
            sign: self.sign(),
            unit: self.unit().exps().to_vec(),
            factors: self
                .factors()
                .iter()
                .map(|(m, k)| FactorJson {
                    exp: m.exps().to_vec(),
                    mult: k,
                })
                .collect(),
        }
    }

    /// Rebuilds a factored rational. Factors must already be canonically
    /// oriented, as written by [`FactoredRat::to_json`].
    pub fn from_json(j: &FactoredJson) -> Result<Self> {
        let vars = vars_from(&j.vars, j.grid)?;
        if j.zero {
            return Ok(FactoredRat::zero(&vars));
        }
        if j.sign != 1 && j.sign != -1 {
            return Err(Error::Parse(format!("sign {}", j.sign)));
        }
        let mut b = Brackets::new();
        for f in &j.factors {
            let m = monomial_from(&vars, &f.exp)?;
            if !m.is_canonical() || f.mult == 0 {
                return Err(Error::Parse("non-canonical bracket factor".into()));
            }
            match b.push(&m, f.mult)? {
                Push::Sign(1) => {}
                _ => return Err(Error::Parse("non-canonical bracket factor".into())),
            }
        }
        Ok(FactoredRat::from_parts(
            &vars,
            j.sign,
            monomial_from(&vars, &j.unit)?,
            b,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::bracket::bracket_class;

    #[test]
    fn poly_json_shape() {
        let v = VarSet::new(&["t1", "y1"]).unwrap();
        let p = &v.poly("t1^1/2").unwrap()
            - &v.poly("y1^-1")
                .unwrap()
                .scale(&parse_rational("3/2").unwrap());
        let s = serde_json::to_string(&p.to_json()).unwrap();
        assert_eq!(
            s,
            r#"{"vars":["t1","y1"],"grid":4,"terms":[{"coeff":"-3/2","exp":[0,-4]},{"coeff":"1","exp":[2,0]}]}"#
        );
        let back = LaurentPoly::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back, p);
        assert_eq!(serde_json::to_string(&back.to_json()).unwrap(), s);
    }

    #[test]
    fn factored_round_trip() {
        let v = VarSet::standard(1, &[]);
        let f = bracket_class(&(&v.poly("t1^-1").unwrap() - &v.poly("y1*t2").unwrap())).unwrap();
        let j = f.to_json();
        assert_eq!(FactoredRat::from_json(&j).unwrap(), f);
    }

    #[test]
    fn rejects_wrong_arity_and_grid() {
        let bad = PolyJson {
            vars: vec!["t1".into()],
            grid: 4,
            terms: vec![TermJson {
                coeff: "1".into(),
                exp: vec![0, 0],
            }],
        };
        assert!(LaurentPoly::from_json(&bad).is_err());
        let grid = PolyJson {
            grid: 2,
            terms: vec![],
            ..bad
        };
        assert!(LaurentPoly::from_json(&grid).is_err());
    }
}
