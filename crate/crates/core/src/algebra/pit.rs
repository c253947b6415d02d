//! Randomized polynomial identity testing over the prime field.
//!
//! A nonzero rational function of total degree `d` vanishes at a uniformly
//! random point with probability at most `d / p`; `k` independent trials
//! bring the one-sided error below `(d / p)^k`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{Fp, PRIME};
use crate::error::{Error, Result};

/// How two values are compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompareMode {
    Exact,
    Random { trials: u32, seed: u64 },
}

impl CompareMode {
    pub fn random(seed: u64) -> Self {
        CompareMode::Random {
            trials: DEFAULT_TRIALS,
            seed,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CompareMode::Exact => "exact",
            CompareMode::Random { .. } => "random",
        }
    }
}

pub const DEFAULT_TRIALS: u32 = 8;

/// Resampling budget per trial when a denominator vanishes.
const MAX_RESAMPLES: u32 = 64;

/// Deterministic generator for a (seed, stream) pair.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Uniform nonzero field element.
pub fn random_nonzero<R: Rng>(rng: &mut R) -> Fp {
    Fp::new(rng.gen_range(1..PRIME))
}

pub fn random_point<R: Rng>(rng: &mut R, n: usize) -> Vec<Fp> {
    (0..n).map(|_| random_nonzero(rng)).collect()
}

/// Runs `trials` comparisons at random points; `eval` returns the two values
/// to compare. Points where a denominator vanishes are resampled.
pub fn agree_at_random_points<E>(n: usize, trials: u32, seed: u64, mut eval: E) -> Result<bool>
where
    E: FnMut(&[Fp]) -> Result<(Fp, Fp)>,
{
    let mut rng = rng(seed, 0);
    for _ in 0..trials {
        let (a, b) = sample_until_defined(&mut rng, n, &mut eval)?;
        if a != b {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Draws points until `eval` succeeds, retrying on vanishing denominators.
pub fn sample_until_defined<R, E, T>(rng: &mut R, n: usize, eval: &mut E) -> Result<T>
where
    R: Rng,
    E: FnMut(&[Fp]) -> Result<T>,
{
    for _ in 0..MAX_RESAMPLES {
        let pt = random_point(rng, n);
        match eval(&pt) {
            Err(Error::DenominatorVanishes) => continue,
            other => return other,
        }
    }
    Err(Error::DenominatorVanishes)
}

/// Upper bound on the false-equality probability, as log2.
pub fn error_bound_log2(degree: u64, trials: u32) -> f64 {
    let d = degree.max(1) as f64;
    trials as f64 * (d.log2() - (PRIME as f64).log2())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_bound_is_tiny_for_desk_degrees() {
        assert!(error_bound_log2(10_000, DEFAULT_TRIALS) < -40.0);
    }

    #[test]
    fn seeded_points_are_reproducible() {
        let a = random_point(&mut rng(3, 0), 4);
        let b = random_point(&mut rng(3, 0), 4);
        let c = random_point(&mut rng(3, 1), 4);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.iter().all(|x| x.value() != 0));
    }

    #[test]
    fn resampling_gives_up_eventually() {
        let r = agree_at_random_points(1, 1, 0, |_| Err(Error::DenominatorVanishes));
        assert!(matches!(r, Err(Error::DenominatorVanishes)));
    }
}
