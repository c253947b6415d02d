use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderEntry {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub params: BTreeMap<String, Value>,
    pub orders: Vec<OrderEntry>,
}

impl Report {
    pub fn new(check: &str) -> Self {
        Report {
            check: check.to_string(),
            params: BTreeMap::new(),
            orders: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn push(
        &mut self,
        n: usize,
        label: Option<String>,
        ok: bool,
        witness: Option<Value>,
        ms: u64,
    ) {
        let status = Status::from_bool(ok);
        let witness = match (status, witness) {
            (Status::Fail, None) => Some(Value::String("no witness recorded".into())),
            (_, w) => w,
        };
        self.orders.push(OrderEntry {
            n,
            label,
            status,
            witness,
            ms,
        });
    }

    pub fn skip(&mut self, n: usize, label: Option<String>, reason: &str) {
        self.orders.push(OrderEntry {
            n,
            label,
            status: Status::Skipped,
            witness: Some(Value::String(reason.to_string())),
            ms: 0,
        });
    }

    /// Appends the entries of another report under a label prefix.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut e in other.orders {
            e.label = Some(match e.label {
                Some(l) => format!("{prefix}/{l}"),
                None => prefix.to_string(),
            });
            self.orders.push(e);
        }
    }

    pub fn passed(&self) -> bool {
        self.orders.iter().all(|e| e.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &OrderEntry> {
        self.orders.iter().filter(|e| e.status == Status::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("check {}", self.check);
        for (k, v) in &self.params {
            let _ = write!(s, " {k}={}", plain(v));
        }
        s.push('\n');
        for e in &self.orders {
            let status = match e.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skip",
            };
            let _ = write!(s, "  n={:<2} {status:<4}", e.n);
            if let Some(l) = &e.label {
                let _ = write!(s, " {l}");
            }
            let _ = write!(s, " ({} ms)", e.ms);
            s.push('\n');
            if e.status != Status::Pass {
                if let Some(w) = &e.witness {
                    let _ = writeln!(s, "      {}", plain(w));
                }
            }
        }
        let _ = writeln!(s, "result: {}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape_and_status() {
        let mut r = Report::new("main").param("r", 1).param("mode", "exact");
        r.push(0, None, true, None, 3);
        assert!(r.passed());
        r.push(1, Some("series".into()), false, None, 0);
        assert!(!r.passed());
        assert!(r.failures().all(|e| e.witness.is_some()));
        let j: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(j["check"], "main");
        assert_eq!(j["params"]["r"], 1);
        assert_eq!(j["orders"][0]["status"], "pass");
        assert!(j["orders"][0].get("witness").is_none());
        assert_eq!(j["orders"][1]["label"], "series");
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.to_text().contains("result: FAIL"));
    }
}
