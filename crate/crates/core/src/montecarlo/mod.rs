//! Simulation of the exact SINR models, used as the oracle for every
//! analytic result.
//!
//! Trial `i` draws from its own ChaCha8 stream `(seed, i)`, and trials only
//! contribute integer success counts, so estimates are bit-identical for
//! any thread count. Each run evaluates a whole list of thresholds on the
//! same network draws.

mod coverage;
mod ppp;
mod secrecy;

pub use coverage::{mc_coverage_general, mc_hetnet_coverage, mc_mmwave_coverage};
pub use ppp::{sample_ppp, sample_ring_radii_sq, PointSet};
pub use secrecy::{
    eavesdropper_radius, mc_connection_outage, mc_connection_outage_with, mc_secrecy_outage, Nulling,
};

use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Default far-field truncation: simulate out to this multiple of the
/// natural near-field radius and replace the rest by its mean.
pub const DEFAULT_TRUNCATION: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McOptions {
    pub trials: u64,
    pub seed: u64,
    pub truncation: f64,
}

impl McOptions {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self { trials, seed, truncation: DEFAULT_TRUNCATION }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Usage("Monte Carlo needs at least one trial".into()));
        }
        if !(self.truncation > 1.0 && self.truncation.is_finite()) {
            return Err(Error::Usage("truncation factor must exceed 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub p_hat: f64,
    pub std_err: f64,
    pub trials: u64,
    pub seed: u64,
}

impl McEstimate {
    pub fn from_counts(successes: u64, trials: u64, seed: u64) -> Self {
        let p = successes as f64 / trials as f64;
        Self {
            p_hat: p,
            std_err: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
            seed,
        }
    }

    /// `|p_hat - value| <= k · std_err`, with a floor for degenerate estimates.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        let floor = 1.0 / self.trials as f64;
        (self.p_hat - value).abs() <= k * self.std_err.max(floor)
    }
}

/// Independent stream for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Runs `trial(rng, hits)` for every trial; `hits[j]` counts successes of
/// threshold `j`.
fn run_counts<F>(opts: &McOptions, n_thresholds: usize, trial: F) -> Vec<McEstimate>
where
    F: Fn(&mut ChaCha8Rng, &mut [u64]) + Sync,
{
    let counts = sum_counts(opts, n_thresholds, &trial);
    counts
        .into_iter()
        .map(|c| McEstimate::from_counts(c, opts.trials, opts.seed))
        .collect()
}

#[cfg(feature = "parallel")]
fn sum_counts<F>(opts: &McOptions, n: usize, trial: &F) -> Vec<u64>
where
    F: Fn(&mut ChaCha8Rng, &mut [u64]) + Sync,
{
    use rayon::prelude::*;
    (0..opts.trials)
        .into_par_iter()
        .fold(
            || vec![0u64; n],
            |mut acc, i| {
                trial(&mut trial_rng(opts.seed, i), &mut acc);
                acc
            },
        )
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

#[cfg(not(feature = "parallel"))]
fn sum_counts<F>(opts: &McOptions, n: usize, trial: &F) -> Vec<u64>
where
    F: Fn(&mut ChaCha8Rng, &mut [u64]) + Sync,
{
    let mut acc = vec![0u64; n];
    for i in 0..opts.trials {
        trial(&mut trial_rng(opts.seed, i), &mut acc);
    }
    acc
}
