use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::emit::{format_f64, format_opt, Table};
use super::{tag, ExperimentConfig};
use crate::bounds;
use crate::error::Result;
use crate::rng;
use crate::strategies::{StrategyKind, StrategySpec};
use crate::tdi::TdiDistribution;

/// Largest relative bias found over the candidate family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    pub relative_bias: f64,
    pub worst: TdiDistribution,
    pub candidates: usize,
}

/// Candidate laws at support bound `eps`: point masses on an even grid, the
/// uniform law, and random finite mixtures from the stream at `key`.
fn candidates(cfg: &ExperimentConfig, eps: f64, key: &[u64]) -> Result<Vec<TdiDistribution>> {
    let wc = &cfg.worst_case;
    let mut out = Vec::new();
    let n = wc.xi_points.max(1);
    for i in 0..n {
        let xi = if n == 1 {
            0.0
        } else {
            -eps + 2.0 * eps * i as f64 / (n - 1) as f64
        };
        out.push(TdiDistribution::delta(xi.clamp(-eps, eps), eps)?);
    }
    if eps > 0.0 {
        out.push(TdiDistribution::uniform(eps)?);
        let mut path = vec![tag::WORST_CASE];
        path.extend_from_slice(key);
        let mut rng = rng::stream(cfg.seed, &path);
        for _ in 0..wc.random_mixtures {
            let atoms = rng.random_range(2..=wc.mixture_atoms.max(2));
            let points: Vec<f64> = (0..atoms).map(|_| rng.random_range(-eps..=eps)).collect();
            let raw: Vec<f64> = (0..atoms).map(|_| rng.random_range(0.01..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
            let head: f64 = weights[..atoms - 1].iter().sum();
            weights[atoms - 1] = 1.0 - head;
            out.push(TdiDistribution::discrete(points, weights, eps)?);
        }
    }
    Ok(out)
}

/// `max_f |b(f)/ω|` over the candidate family, from exact averaged outcome laws.
pub fn worst_case_bias(
    cfg: &ExperimentConfig,
    spec: &StrategySpec,
    eps: f64,
    omega: f64,
    key: &[u64],
) -> Result<WorstCase> {
    let strategy = spec.build(&cfg.params(omega))?;
    let family = candidates(cfg, eps, key)?;
    let biases = family
        .par_iter()
        .map(|f| {
            let probs = strategy.averaged_probabilities(f, cfg.sharing, cfg.nodes)?;
            let (hat, _) = strategy.estimator.estimate(strategy.mean_of(&probs));
            Ok(((hat - omega) / omega).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    let (best, &relative_bias) =
        biases
            .iter()
            .enumerate()
            .fold((0, &f64::NEG_INFINITY), |acc, (i, b)| {
                if *b > *acc.1 {
                    (i, b)
                } else {
                    acc
                }
            });
    Ok(WorstCase {
        relative_bias,
        worst: family[best].clone(),
        candidates: family.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorstCaseRecord {
    pub strategy: String,
    pub epsilon: f64,
    pub omega: f64,
    pub relative_bias: f64,
    /// CE bias bound divided by `|ω|`, for CE-SWAP rows.
    pub relative_bound: Option<f64>,
    pub worst: TdiDistribution,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WorstCaseResult {
    pub records: Vec<WorstCaseRecord>,
    pub runtime_secs: f64,
}

impl WorstCaseResult {
    pub fn tables(&self) -> Vec<Table> {
        let mut t = Table::new(
            "worst_case",
            &[
                "strategy",
                "epsilon",
                "omega",
                "relative_bias",
                "relative_bound",
                "worst",
            ],
        );
        for r in &self.records {
            let worst = serde_json::to_string(&r.worst).unwrap_or_default();
            t.push(vec![
                r.strategy.clone(),
                format_f64(r.epsilon),
                format_f64(r.omega),
                format_f64(r.relative_bias),
                format_opt(r.relative_bound),
                worst,
            ]);
        }
        vec![t]
    }
}

/// Worst-case relative bias of every strategy over the ε grid at the
/// representative ω.
pub fn worst_case_sweep(cfg: &ExperimentConfig) -> Result<WorstCaseResult> {
    cfg.validate()?;
    let start = Instant::now();
    let omega = cfg.omega.representative();
    let p = cfg.params(omega);
    let mut records = Vec::new();
    for (si, spec) in cfg.strategies.iter().enumerate() {
        for (ei, eps) in cfg.epsilons.values().into_iter().enumerate() {
            let wc = worst_case_bias(cfg, spec, eps, omega, &[si as u64, ei as u64])?;
            let is_ce_swap = spec.build(&p)?.kind == StrategyKind::CeSwap;
            records.push(WorstCaseRecord {
                strategy: spec.name().into(),
                epsilon: eps,
                omega,
                relative_bias: wc.relative_bias,
                relative_bound: if is_ce_swap {
                    bounds::ce_bias_bound(&p, eps).ok().map(|b| b / omega.abs())
                } else {
                    None
                },
                worst: wc.worst,
            });
        }
    }
    Ok(WorstCaseResult {
        records,
        runtime_secs: start.elapsed().as_secs_f64(),
    })
}
