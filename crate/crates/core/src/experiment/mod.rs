//! Experiment engine: MSE estimation, ε sweeps, worst-case bias search,
//! multi-level environments and CSV/JSON persistence.
//!
//! Every random quantity is drawn from a stream keyed by its position in the
//! experiment grid, and parallel results are merged in index order, so the
//! output depends on the seed only.

mod config;
mod emit;
mod multilevel;
mod sweep;
mod worst;

pub use config::*;
pub use emit::{emit, format_f64, sha256_hex, FileEntry, Manifest, Table};
pub use multilevel::{multilevel_sweep, TruncationRecord};
pub use sweep::{bounds_table, sweep_epsilon, Aggregate, BoundsResult, SweepRecord, SweepResult};
pub use worst::{worst_case_bias, worst_case_sweep, WorstCase, WorstCaseRecord, WorstCaseResult};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::strategies::{RunMode, Strategy};
use crate::tdi::TdiDistribution;

/// Stream tags separating the independent random families of a run.
pub(crate) mod tag {
    pub const OMEGA: u64 = 1;
    pub const REPETITION: u64 = 2;
    pub const WORST_CASE: u64 = 3;
    pub const MULTILEVEL: u64 = 4;
}

/// Mean-squared error of one strategy at one `(f, ω)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MseEstimate {
    pub mse: f64,
    pub bias: f64,
    pub variance: f64,
    pub mean_estimate: f64,
    /// Experiments whose mean outcome fell outside the estimator's domain.
    pub clamped: usize,
    pub repetitions: usize,
}

/// MSE of `strategy` at true frequency `omega` under dilation law `f`.
///
/// Exact mode propagates the single-shot variance of the averaged outcome law
/// through the estimator. Monte-Carlo mode runs `cfg.repetitions` experiments
/// of `cfg.nu` shots each; repetition `r` draws from the stream at `key ++ [r]`.
pub fn estimate_mse(
    cfg: &ExperimentConfig,
    strategy: &Strategy,
    f: &TdiDistribution,
    omega: f64,
    key: &[u64],
) -> Result<MseEstimate> {
    f.validate()?;
    match cfg.mode {
        Mode::Exact => {
            let probs = strategy.averaged_probabilities(f, cfg.sharing, cfg.nodes)?;
            let x = strategy.mean_of(&probs);
            let (hat, clamped) = strategy.estimator.estimate(x);
            let ssv = strategy.single_shot_variance(&probs);
            let variance = if ssv == 0.0 {
                0.0
            } else {
                strategy.estimator.derivative(x).powi(2) * ssv / cfg.nu as f64
            };
            let bias = hat - omega;
            Ok(MseEstimate {
                mse: variance + bias * bias,
                bias,
                variance,
                mean_estimate: hat,
                clamped: clamped as usize,
                repetitions: 1,
            })
        }
        Mode::MonteCarlo => {
            let averaged = match cfg.draw_scheme {
                DrawScheme::PerShot => {
                    Some(strategy.averaged_probabilities(f, cfg.sharing, cfg.nodes)?)
                }
                DrawScheme::PerExperiment => None,
            };
            let n_ops = strategy.timed_op_count();
            let runs = (0..cfg.repetitions)
                .into_par_iter()
                .map(|r| {
                    let mut path = key.to_vec();
                    path.extend([tag::REPETITION, r as u64]);
                    let mut rng = rng::stream(cfg.seed, &path);
                    let probs = match &averaged {
                        Some(p) => p.clone(),
                        None => strategy.probabilities(&f.sample(n_ops, &mut rng))?,
                    };
                    strategy.outcome_from(probs, cfg.nu, &mut rng, RunMode::Sampled)
                })
                .collect::<Result<Vec<_>>>()?;
            let m = runs.len() as f64;
            let mean_estimate = runs.iter().map(|o| o.omega_hat).sum::<f64>() / m;
            let mse = runs
                .iter()
                .map(|o| (o.omega_hat - omega).powi(2))
                .sum::<f64>()
                / m;
            let variance = runs
                .iter()
                .map(|o| (o.omega_hat - mean_estimate).powi(2))
                .sum::<f64>()
                / m;
            Ok(MseEstimate {
                mse,
                bias: mean_estimate - omega,
                variance,
                mean_estimate,
                clamped: runs.iter().filter(|o| o.clamped).count(),
                repetitions: runs.len(),
            })
        }
    }
}

/// Runs `f` on a pool of `threads` workers, or on the global pool when `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Sample mean and standard deviation (`n − 1` normalization).
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
