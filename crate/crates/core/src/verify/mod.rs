//! Localization series, verification checks, reports and the command line.

pub mod cache;
pub mod checks;
pub mod cli;
pub mod report;

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use crate::algebra::{BracketSum, CompareMode, FactoredRat, VarSet, Vars};
use crate::error::{Error, Result};
use crate::partitions::{
    enumerate_levels, enumerate_tuples, PartitionTuple, DEFAULT_SOLID_CEILING,
};
use crate::series::Series;
use crate::vertex::WeightRecord;

pub use cache::{cache_key, Cache, SCHEMA_VERSION};
pub use checks::*;
pub use cli::run_cli;
pub use report::{OrderEntry, Report, Status};

/// Default ceiling on the number of tuples summed in one run.
pub const DEFAULT_MAX_TUPLES: usize = 500;

/// How comparisons are carried out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Exact at every order.
    Exact,
    /// Exact for `n <= 2`, randomized above.
    Random,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Random => "random",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Settings {
    pub mode: Mode,
    pub seed: u64,
    pub trials: u32,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            mode: Mode::Random,
            seed: 0,
            trials: crate::algebra::pit::DEFAULT_TRIALS,
        }
    }
}

impl Settings {
    /// Orders up to 2 are always compared exactly.
    pub fn compare_mode(&self, n: usize) -> CompareMode {
        if self.mode == Mode::Exact || n <= 2 {
            CompareMode::Exact
        } else {
            self.random(n as u64)
        }
    }

    /// A randomized mode with a seed derived from `stream`.
    pub fn random(&self, stream: u64) -> CompareMode {
        CompareMode::Random {
            trials: self.trials,
            seed: self
                .seed
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add(stream),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: usize,
    pub misses: usize,
    pub audited: usize,
}

/// Worker pool, cache and guards shared by all checks.
pub struct Engine {
    pool: rayon::ThreadPool,
    jobs: usize,
    cache: Option<Cache>,
    audit_rate: f64,
    max_tuples: usize,
    timings: bool,
    hits: AtomicUsize,
    misses: AtomicUsize,
    audited: AtomicUsize,
}

impl Engine {
    pub fn new(jobs: usize) -> Result<Self> {
        let jobs = jobs.max(1);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Precondition(format!("worker pool: {e}")))?;
        Ok(Engine {
            pool,
            jobs,
            cache: None,
            audit_rate: 0.0,
            max_tuples: DEFAULT_MAX_TUPLES,
            timings: true,
            hits: AtomicUsize::new(0),
            misses: AtomicUsize::new(0),
            audited: AtomicUsize::new(0),
        })
    }

    pub fn with_cache(mut self, dir: &Path) -> Result<Self> {
        self.cache = Some(Cache::open(dir)?);
        Ok(self)
    }

    /// Fraction of cache hits that are recomputed and compared.
    pub fn with_audit(mut self, rate: f64) -> Self {
        self.audit_rate = rate.clamp(0.0, 1.0);
        self
    }

    pub fn with_max_tuples(mut self, n: usize) -> Self {
        self.max_tuples = n;
        self
    }

    /// With timings off every `ms` field is 0, so reports are reproducible
    /// byte for byte.
    pub fn with_timings(mut self, on: bool) -> Self {
        self.timings = on;
        self
    }

    pub fn jobs(&self) -> usize {
        self.jobs
    }

    pub fn cache_stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            audited: self.audited.load(Ordering::Relaxed),
        }
    }

    pub(crate) fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        self.pool.install(f)
    }

    pub(crate) fn clock(&self) -> Clock {
        Clock {
            start: Instant::now(),
            on: self.timings,
        }
    }

    fn audited_key(&self, key: &str) -> bool {
        if self.audit_rate <= 0.0 {
            return false;
        }
        if self.audit_rate >= 1.0 {
            return true;
        }
        let head = u32::from_str_radix(&key[..8], 16).expect("hex key");
        (head as f64) < self.audit_rate * (u32::MAX as f64 + 1.0)
    }

    /// Number of tuples a series of rank `r` to order `n` sums over.
    pub fn tuple_count(r: usize, n: usize) -> Result<usize> {
        let levels = enumerate_levels(4, n, n.max(DEFAULT_SOLID_CEILING))?;
        let counts: Vec<usize> = levels.iter().map(Vec::len).collect();
        // coefficients of (sum_k counts_k q^k)^r
        let mut acc = vec![0usize; n + 1];
        acc[0] = 1;
        for _ in 0..r {
            let mut next = vec![0usize; n + 1];
            for i in 0..=n {
                for j in 0..=n - i {
                    next[i + j] += acc[i] * counts[j];
                }
            }
            acc = next;
        }
        Ok(acc.iter().sum())
    }

    fn guard(&self, r: usize, n: usize) -> Result<()> {
        let total = Engine::tuple_count(r, n)?;
        if total > self.max_tuples {
            return Err(Error::ResourceGuard(format!(
                "rank {r} to order {n} sums {total} tuples, above the limit {}",
                self.max_tuples
            )));
        }
        Ok(())
    }

    /// Signed weights of all rank-`r` tuples of total size `n`, in
    /// enumeration order, read from the cache when present.
    pub fn weights(&self, r: usize, n: usize) -> Result<Vec<(PartitionTuple, FactoredRat)>> {
        let vars = VarSet::standard(r, &[]);
        let tuples = enumerate_tuples(r, n)?;
        let cached = match &self.cache {
            Some(c) => c.load(r, n)?,
            None => Default::default(),
        };
        let results: Vec<Result<(WeightRecord, bool)>> = self.install(|| {
            tuples
                .par_iter()
                .map(|t| {
                    let key = cache_key(t);
                    match cached.get(&key) {
                        Some(rec) => {
                            self.hits.fetch_add(1, Ordering::Relaxed);
                            if self.audited_key(&key) {
                                self.audited.fetch_add(1, Ordering::Relaxed);
                                let fresh = WeightRecord::compute(&vars, t)?;
                                if serde_json::to_string(&fresh)? != serde_json::to_string(rec)? {
                                    return Err(Error::InvariantViolation(format!(
                                        "cached weight differs from recomputation for {}",
                                        t.to_json_string()
                                    )));
                                }
                            }
                            Ok((rec.clone(), false))
                        }
                        None => {
                            self.misses.fetch_add(1, Ordering::Relaxed);
                            Ok((WeightRecord::compute(&vars, t)?, true))
                        }
                    }
                })
                .collect()
        });
        let mut fresh = Vec::new();
        let mut out = Vec::with_capacity(results.len());
        for res in results {
            let (rec, new) = res?;
            let w = rec.weight()?.substitute(&vars, &vars.embedding(&vars)?)?;
            out.push((rec.tuple.clone(), w));
            if new {
                fresh.push(rec);
            }
        }
        if let Some(c) = &self.cache {
            c.append(r, n, &fresh)?;
        }
        Ok(out)
    }

    /// `sum_T (-1)^mu [-v_T] ((-1)^r q)^|T|` to order `n`, over
    /// `VarSet::standard(r, [])`.
    pub fn localization_series(&self, r: usize, n: usize) -> Result<Series<BracketSum>> {
        if r == 0 {
            return Err(Error::Precondition("rank must be at least 1".into()));
        }
        self.guard(r, n)?;
        let vars = VarSet::standard(r, &[]);
        let mut coeffs = Vec::with_capacity(n + 1);
        for k in 0..=n {
            coeffs.push(self.localization_coefficient(&vars, r, k)?);
        }
        Series::new(coeffs)
    }

    fn localization_coefficient(&self, vars: &Vars, r: usize, k: usize) -> Result<BracketSum> {
        let mut c = BracketSum::zero(vars);
        for (_, w) in self.weights(r, k)? {
            c = c.add(&BracketSum::from(&w));
        }
        Ok(if (r * k) % 2 == 1 { c.neg() } else { c })
    }
}

pub(crate) struct Clock {
    start: Instant,
    on: bool,
}

impl Clock {
    pub fn ms(&self) -> u64 {
        if self.on {
            self.start.elapsed().as_millis() as u64
        } else {
            0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{ClosedForm, Coeff};

    #[test]
    fn tuple_counts_by_convolution() {
        assert_eq!(
            Engine::tuple_count(1, 6).unwrap(),
            1 + 1 + 4 + 10 + 26 + 59 + 140
        );
        assert_eq!(Engine::tuple_count(2, 2).unwrap(), 1 + 2 + 9);
        let e = Engine::new(1).unwrap().with_max_tuples(10);
        assert!(matches!(
            e.localization_series(2, 2),
            Err(Error::ResourceGuard(_))
        ));
    }

    #[test]
    fn first_coefficients() {
        let e = Engine::new(2).unwrap();
        let z = e.localization_series(1, 1).unwrap();
        let v = VarSet::standard(1, &[]);
        assert!(z
            .coeff(0)
            .equals(&BracketSum::one(&v), CompareMode::Exact)
            .unwrap());
        let y = v.parse_monomial("y1").unwrap();
        let want = crate::series::f_t(&v)
            .unwrap()
            .mul(&FactoredRat::from_brackets(&v, [(&y, 1)]).unwrap())
            .unwrap()
            .negate();
        assert!(z
            .coeff(1)
            .equals(&BracketSum::from(&want), CompareMode::Exact)
            .unwrap());
        let cf = ClosedForm::magnificent(&v).unwrap().series(&v, 2).unwrap();
        let z2 = e.localization_series(1, 2).unwrap();
        for k in 0..=2 {
            assert!(
                z2.coeff(k).equals(cf.coeff(k), CompareMode::Exact).unwrap(),
                "order {k}"
            );
        }
        assert!(!z2.coeff(2).is_zero());
    }
}
