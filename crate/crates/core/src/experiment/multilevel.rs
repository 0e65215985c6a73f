use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sweep::{SweepRecord, SweepResult};
use super::{estimate_mse, tag, ExperimentConfig, Mode};
use crate::error::Result;
use crate::model::{EnvironmentSpec, PhysicalParams};
use crate::strategies::{MultilevelRepr, StrategySpec};

/// One rung of the Fock-truncation ladder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationRecord {
    pub modes: usize,
    pub fock_dim: usize,
    pub doubled: usize,
    /// Largest relative change of the exact-mode MSE over strategies and ε.
    pub max_relative_change: f64,
    pub converged: bool,
}

fn specs(env: EnvironmentSpec) -> [StrategySpec; 2] {
    [
        StrategySpec::FeMultilevel {
            env: env.clone(),
            repr: MultilevelRepr::Mixture,
        },
        StrategySpec::CeMultilevel {
            env,
            repr: MultilevelRepr::Mixture,
        },
    ]
}

fn exact_mses(
    cfg: &ExperimentConfig,
    p: &PhysicalParams,
    couplings: &[f64],
    fock_dim: usize,
) -> Result<Vec<f64>> {
    let exact = ExperimentConfig {
        mode: Mode::Exact,
        ..cfg.clone()
    };
    let env = EnvironmentSpec::phonons(fock_dim, couplings.to_vec())?;
    let eps = cfg.epsilons.values();
    specs(env)
        .iter()
        .flat_map(|s| eps.iter().map(move |&e| (s, e)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(spec, e)| {
            let s = spec.build(p)?;
            Ok(estimate_mse(&exact, &s, &cfg.distribution.at(e)?, p.omega, &[])?.mse)
        })
        .collect()
}

/// Doubles the Fock truncation until the exact-mode MSE moves by less than
/// the configured tolerance or the next rung exceeds the cap. Returns the
/// chosen truncation and the ladder.
fn converge(
    cfg: &ExperimentConfig,
    p: &PhysicalParams,
    couplings: &[f64],
) -> Result<(usize, Vec<TruncationRecord>)> {
    let ml = &cfg.multilevel;
    let mut d = ml.fock_dim;
    let mut ladder = Vec::new();
    let mut current = exact_mses(cfg, p, couplings, d)?;
    while 2 * d <= ml.max_fock_dim {
        let next = exact_mses(cfg, p, couplings, 2 * d)?;
        let change = current
            .iter()
            .zip(&next)
            .map(|(a, b)| {
                if a == b {
                    0.0
                } else {
                    (a - b).abs() / a.abs().max(b.abs())
                }
            })
            .fold(0.0, f64::max);
        let converged = change < ml.convergence_tol;
        ladder.push(TruncationRecord {
            modes: couplings.len(),
            fock_dim: d,
            doubled: 2 * d,
            max_relative_change: change,
            converged,
        });
        if converged {
            break;
        }
        d *= 2;
        current = next;
    }
    Ok((d, ladder))
}

/// FE and CE multi-level protocols for every configured mode count, with
/// the interaction-free reference, after converging the Fock truncation.
/// Monte-Carlo runs are repeated `multilevel.runs` times per point.
pub fn multilevel_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let start = Instant::now();
    let ml = &cfg.multilevel;
    let nu = cfg.nu as f64;
    let eps_grid = cfg.epsilons.values();
    let runs = if cfg.mode == Mode::Exact { 1 } else { ml.runs };
    let mut records = Vec::new();
    let mut truncation = Vec::new();
    for &n in &ml.modes {
        let couplings = &ml.couplings[..n];
        let p = PhysicalParams::new(ml.omega, couplings[0], cfg.interrogation_time())?;
        let (d, ladder) = converge(cfg, &p, couplings)?;
        truncation.extend(ladder);
        let strategies = specs(EnvironmentSpec::phonons(d, couplings.to_vec())?)
            .iter()
            .map(|s| s.build(&p))
            .collect::<Result<Vec<_>>>()?;
        let tasks: Vec<(usize, usize, usize)> = (0..eps_grid.len())
            .flat_map(|ei| (0..runs).flat_map(move |r| (0..2).map(move |si| (ei, r, si))))
            .collect();
        let computed = tasks
            .into_par_iter()
            .map(|(ei, r, si)| {
                let eps = eps_grid[ei];
                let s = &strategies[si];
                let key = [tag::MULTILEVEL, n as u64, si as u64, ei as u64, r as u64];
                let est = estimate_mse(cfg, s, &cfg.distribution.at(eps)?, p.omega, &key)?;
                let mut rec = SweepRecord::new(&s.name, Some(n), &p, nu, eps);
                rec.mse = est.mse;
                rec.bias = est.bias;
                rec.variance = est.variance;
                rec.clamped = est.clamped;
                Ok(((ei, r, si), rec))
            })
            .collect::<Result<Vec<_>>>()?;
        for ((ei, _, si), rec) in computed {
            records.push(rec);
            if si == 1 && cfg.include_if_reference {
                records.push(SweepRecord::if_reference(Some(n), &p, nu, eps_grid[ei]));
            }
        }
    }
    let mut result = SweepResult::from_records(records);
    result.truncation = truncation;
    result.runtime_secs = start.elapsed().as_secs_f64();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{EpsilonGrid, MultilevelConfig};

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            epsilons: EpsilonGrid::List(vec![1e-3]),
            mode: Mode::Exact,
            multilevel: MultilevelConfig {
                modes: vec![1, 2],
                fock_dim: 4,
                max_fock_dim: 8,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn shape_and_ladder() {
        let r = multilevel_sweep(&small()).unwrap();
        // (fe, ce, if) per mode count
        assert_eq!(r.records.len(), 2 * 3);
        assert!(r
            .records
            .iter()
            .all(|x| x.modes.is_some() && x.mse.is_finite()));
        assert!(!r.truncation.is_empty());
        assert!(r
            .truncation
            .iter()
            .all(|t| t.doubled == 2 * t.fock_dim && t.doubled <= 8));
    }

    #[test]
    fn monte_carlo_runs_are_aggregated() {
        let cfg = ExperimentConfig {
            mode: Mode::MonteCarlo,
            repetitions: 5,
            multilevel: MultilevelConfig {
                modes: vec![1],
                fock_dim: 4,
                max_fock_dim: 4,
                runs: 3,
                ..Default::default()
            },
            ..small()
        };
        let r = multilevel_sweep(&cfg).unwrap();
        let fe = r.aggregate("fe_multilevel", Some(1), 1e-3).unwrap();
        assert_eq!(fe.samples, 3);
        assert!(r.truncation.is_empty());
    }
}
