use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::emit::{format_f64, format_opt, Table};
use super::{estimate_mse, mean_std, tag, ExperimentConfig, OmegaSpec};
use crate::bounds::{self, BoundReport};
use crate::error::Result;
use crate::model::PhysicalParams;
use crate::rng;

/// Strategy label of the analytic interaction-free reference rows.
pub const IF_REFERENCE: &str = "if_reference";

/// One `(strategy, ε, ω)` point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub strategy: String,
    /// Number of environment modes, for multi-level runs.
    pub modes: Option<usize>,
    pub epsilon: f64,
    pub omega: f64,
    pub mse: f64,
    pub bias: f64,
    pub variance: f64,
    pub clamped: usize,
    pub loss_ce_upper: Option<f64>,
    pub ce_bias_bound: Option<f64>,
    pub loss_fe_lower: f64,
    pub if_reference: f64,
}

impl SweepRecord {
    pub(crate) fn new(
        strategy: &str,
        modes: Option<usize>,
        p: &PhysicalParams,
        nu: f64,
        eps: f64,
    ) -> Self {
        Self {
            strategy: strategy.into(),
            modes,
            epsilon: eps,
            omega: p.omega,
            mse: f64::NAN,
            bias: f64::NAN,
            variance: f64::NAN,
            clamped: 0,
            loss_ce_upper: bounds::loss_ce_upper(p, nu, eps).ok(),
            ce_bias_bound: bounds::ce_bias_bound(p, eps).ok(),
            loss_fe_lower: bounds::loss_fe_lower(p, nu, eps).0,
            if_reference: bounds::if_reference(nu, p.t, eps, p.omega),
        }
    }

    /// The interaction-free baseline: Heisenberg-limited variance plus the
    /// hardware bias `ε|ω|`.
    pub(crate) fn if_reference(
        modes: Option<usize>,
        p: &PhysicalParams,
        nu: f64,
        eps: f64,
    ) -> Self {
        let mut r = Self::new(IF_REFERENCE, modes, p, nu, eps);
        r.variance = 1.0 / (nu * p.t * p.t);
        r.bias = eps * p.omega.abs();
        r.mse = r.if_reference;
        r
    }
}

/// Spread of the MSE over ω samples (or independent runs) at one ε.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub strategy: String,
    pub modes: Option<usize>,
    pub epsilon: f64,
    pub mean_mse: f64,
    pub std_mse: f64,
    pub mean_bias: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub records: Vec<SweepRecord>,
    pub aggregates: Vec<Aggregate>,
    /// Fock-truncation ladder of multi-level runs.
    pub truncation: Vec<super::TruncationRecord>,
    pub runtime_secs: f64,
}

impl SweepResult {
    pub(crate) fn from_records(records: Vec<SweepRecord>) -> Self {
        let mut aggregates: Vec<Aggregate> = Vec::new();
        let mut keys: Vec<(String, Option<usize>, f64)> = Vec::new();
        for r in &records {
            let k = (r.strategy.clone(), r.modes, r.epsilon);
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
        for (strategy, modes, eps) in keys {
            let group: Vec<&SweepRecord> = records
                .iter()
                .filter(|r| r.strategy == strategy && r.modes == modes && r.epsilon == eps)
                .collect();
            let mses: Vec<f64> = group.iter().map(|r| r.mse).collect();
            let (mean_mse, std_mse) = mean_std(&mses);
            let mean_bias = group.iter().map(|r| r.bias).sum::<f64>() / group.len() as f64;
            aggregates.push(Aggregate {
                strategy,
                modes,
                epsilon: eps,
                mean_mse,
                std_mse,
                mean_bias,
                samples: group.len(),
            });
        }
        Self {
            records,
            aggregates,
            truncation: Vec::new(),
            runtime_secs: 0.0,
        }
    }

    /// Aggregate for `strategy` at `eps` (and `modes`, for multi-level runs).
    pub fn aggregate(&self, strategy: &str, modes: Option<usize>, eps: f64) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.strategy == strategy && a.modes == modes && a.epsilon == eps)
    }

    pub fn tables(&self) -> Vec<Table> {
        let mut points = Table::new(
            "records",
            &[
                "strategy",
                "modes",
                "epsilon",
                "omega",
                "mse",
                "bias",
                "variance",
                "clamped",
                "loss_ce_upper",
                "ce_bias_bound",
                "loss_fe_lower",
                "if_reference",
            ],
        );
        for r in &self.records {
            points.push(vec![
                r.strategy.clone(),
                r.modes.map(|m| m.to_string()).unwrap_or_default(),
                format_f64(r.epsilon),
                format_f64(r.omega),
                format_f64(r.mse),
                format_f64(r.bias),
                format_f64(r.variance),
                r.clamped.to_string(),
                format_opt(r.loss_ce_upper),
                format_opt(r.ce_bias_bound),
                format_f64(r.loss_fe_lower),
                format_f64(r.if_reference),
            ]);
        }
        let mut summary = Table::new(
            "summary",
            &[
                "strategy",
                "modes",
                "epsilon",
                "mean_mse",
                "std_mse",
                "mean_bias",
                "samples",
            ],
        );
        for a in &self.aggregates {
            summary.push(vec![
                a.strategy.clone(),
                a.modes.map(|m| m.to_string()).unwrap_or_default(),
                format_f64(a.epsilon),
                format_f64(a.mean_mse),
                format_f64(a.std_mse),
                format_f64(a.mean_bias),
                a.samples.to_string(),
            ]);
        }
        let mut tables = vec![points, summary];
        if !self.truncation.is_empty() {
            let mut t = Table::new(
                "truncation",
                &[
                    "modes",
                    "fock_dim",
                    "doubled",
                    "max_relative_change",
                    "converged",
                ],
            );
            for r in &self.truncation {
                t.push(vec![
                    r.modes.to_string(),
                    r.fock_dim.to_string(),
                    r.doubled.to_string(),
                    format_f64(r.max_relative_change),
                    r.converged.to_string(),
                ]);
            }
            tables.push(t);
        }
        tables
    }
}

/// ω values for grid point `eps_index`: the fixed value, or uniform samples
/// from the stream at `[OMEGA, eps_index]`.
pub(crate) fn omega_samples(cfg: &ExperimentConfig, eps_index: usize) -> Vec<f64> {
    match cfg.omega {
        OmegaSpec::Fixed(w) => vec![w],
        OmegaSpec::Range { low, high, samples } => {
            let mut rng = rng::stream(cfg.seed, &[tag::OMEGA, eps_index as u64]);
            (0..samples)
                .map(|_| {
                    if low == high {
                        low
                    } else {
                        rng.random_range(low..high)
                    }
                })
                .collect()
        }
    }
}

/// MSE of every configured strategy at every `(ε, ω)` grid point.
pub fn sweep_epsilon(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let start = Instant::now();
    let eps_grid = cfg.epsilons.values();
    let nu = cfg.nu as f64;
    let mut tasks = Vec::new();
    for (ei, &eps) in eps_grid.iter().enumerate() {
        for (wi, w) in omega_samples(cfg, ei).into_iter().enumerate() {
            for si in 0..cfg.strategies.len() {
                tasks.push((ei, eps, wi, w, si));
            }
        }
    }
    let computed = tasks
        .into_par_iter()
        .map(|(ei, eps, wi, w, si)| {
            let p = cfg.params(w);
            let spec = &cfg.strategies[si];
            let strategy = spec.build(&p)?;
            let f = cfg.distribution.at(eps)?;
            let est = estimate_mse(cfg, &strategy, &f, w, &[si as u64, ei as u64, wi as u64])?;
            let mut r = SweepRecord::new(spec.name(), None, &p, nu, eps);
            r.mse = est.mse;
            r.bias = est.bias;
            r.variance = est.variance;
            r.clamped = est.clamped;
            Ok(((ei, wi, si), r))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut records = Vec::with_capacity(computed.len());
    let mut iter = computed.into_iter().peekable();
    while let Some(((ei, wi, _), r)) = iter.next() {
        records.push(r);
        let point_done = iter
            .peek()
            .is_none_or(|((e, w, _), _)| (*e, *w) != (ei, wi));
        if point_done && cfg.include_if_reference {
            let w = records.last().map(|r| r.omega).unwrap_or_default();
            records.push(SweepRecord::if_reference(
                None,
                &cfg.params(w),
                nu,
                eps_grid[ei],
            ));
        }
    }
    if cfg.strategies.is_empty() && cfg.include_if_reference {
        for (ei, &eps) in eps_grid.iter().enumerate() {
            for w in omega_samples(cfg, ei) {
                records.push(SweepRecord::if_reference(None, &cfg.params(w), nu, eps));
            }
        }
    }
    let mut result = SweepResult::from_records(records);
    result.runtime_secs = start.elapsed().as_secs_f64();
    Ok(result)
}

/// Closed-form bounds at every ε of the grid, at the representative ω.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsResult {
    pub reports: Vec<BoundReport>,
    pub runtime_secs: f64,
}

impl BoundsResult {
    pub fn tables(&self) -> Vec<Table> {
        let mut t = Table::new(
            "bounds",
            &[
                "epsilon",
                "omega",
                "nu",
                "eps_star",
                "regime",
                "hardware_limit",
                "if_reference",
                "loss_fe_lower",
                "loss_ce_upper",
                "ce_bias_bound",
                "eta",
                "eta_expansion_valid",
                "qfi_fe_upper_max",
                "kraus_qfi_min",
                "opt_bias_lower",
            ],
        );
        for r in &self.reports {
            let qfi_max = r
                .qfi_fe_upper
                .iter()
                .map(|x| x.1)
                .fold(f64::NEG_INFINITY, f64::max);
            let kraus_min = r
                .kraus_qfi
                .iter()
                .map(|x| x.1)
                .fold(f64::INFINITY, f64::min);
            t.push(vec![
                format_f64(r.epsilon),
                format_f64(r.omega),
                format_f64(r.nu),
                format_f64(r.eps_star),
                serde_json::to_value(r.regime)
                    .ok()
                    .and_then(|v| v.as_str().map(String::from))
                    .unwrap_or_default(),
                format_f64(r.hardware_limit),
                format_f64(r.if_reference),
                format_f64(r.loss_fe_lower),
                format_opt(r.loss_ce_upper),
                format_opt(r.ce_bias_bound),
                format_f64(r.eta),
                r.eta_expansion_valid.to_string(),
                format_f64(qfi_max),
                format_f64(kraus_min),
                format_f64(r.opt_bias_lower),
            ]);
        }
        vec![t]
    }
}

pub fn bounds_table(cfg: &ExperimentConfig) -> Result<BoundsResult> {
    cfg.validate()?;
    let start = Instant::now();
    let p = cfg.params(cfg.omega.representative());
    let reports = cfg
        .epsilons
        .values()
        .into_par_iter()
        .map(|eps| BoundReport::new(&p, cfg.nu as f64, eps, cfg.worst_case.xi_points))
        .collect();
    Ok(BoundsResult {
        reports,
        runtime_secs: start.elapsed().as_secs_f64(),
    })
}
