use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EnvironmentSpec, PhysicalParams};
use crate::strategies::{ControlModel, NodePolicy, Sharing, StrategySpec};
use crate::tdi::TdiDistribution;

/// Monte-Carlo repetitions or exact outcome-law quadrature.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    MonteCarlo,
    #[serde(alias = "exact_quadrature")]
    Exact,
}

/// How dilations are redrawn in Monte-Carlo mode.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DrawScheme {
    /// Every shot redraws every timed operation; shots follow the averaged law.
    #[default]
    PerShot,
    /// One draw per ν-shot experiment.
    PerExperiment,
}

/// Family of dilation laws indexed by the support bound ε.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionFamily {
    #[default]
    Uniform,
    /// Point mass at +ε.
    DeltaMax,
    /// Point mass at −ε.
    DeltaMin,
}

impl DistributionFamily {
    pub fn at(&self, eps: f64) -> Result<TdiDistribution> {
        match self {
            Self::Uniform => TdiDistribution::uniform(eps),
            Self::DeltaMax => TdiDistribution::delta(eps, eps),
            Self::DeltaMin => TdiDistribution::delta(-eps, eps),
        }
    }
}

/// A fixed frequency or a uniform sampling interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OmegaSpec {
    Fixed(f64),
    Range { low: f64, high: f64, samples: usize },
}

impl Default for OmegaSpec {
    fn default() -> Self {
        Self::Range {
            low: 1.0 / 500.0,
            high: 1.0 / 100.0,
            samples: 100,
        }
    }
}

impl OmegaSpec {
    pub fn samples(&self) -> usize {
        match self {
            Self::Fixed(_) => 1,
            Self::Range { samples, .. } => *samples,
        }
    }

    pub fn representative(&self) -> f64 {
        match self {
            Self::Fixed(w) => *w,
            Self::Range { low, high, .. } => 0.5 * (low + high),
        }
    }
}

/// Explicit ε values or a generated grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsilonGrid {
    List(Vec<f64>),
    Spaced {
        start: f64,
        stop: f64,
        points: usize,
        #[serde(default)]
        log: bool,
    },
}

impl Default for EpsilonGrid {
    fn default() -> Self {
        Self::Spaced {
            start: 1e-6,
            stop: 1e-2,
            points: 12,
            log: true,
        }
    }
}

impl EpsilonGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Self::List(v) => v.clone(),
            Self::Spaced {
                start,
                stop,
                points,
                log,
            } => {
                let n = *points;
                if n == 1 {
                    return vec![*start];
                }
                (0..n)
                    .map(|i| {
                        let s = i as f64 / (n - 1) as f64;
                        if *log {
                            (start.ln() + s * (stop.ln() - start.ln())).exp()
                        } else {
                            start + s * (stop - start)
                        }
                    })
                    .collect()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WorstCaseConfig {
    pub xi_points: usize,
    pub random_mixtures: usize,
    /// Largest number of atoms in a random mixture.
    pub mixture_atoms: usize,
}

impl Default for WorstCaseConfig {
    fn default() -> Self {
        Self {
            xi_points: 41,
            random_mixtures: 64,
            mixture_atoms: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MultilevelConfig {
    pub omega: f64,
    /// Mode counts to simulate; mode `N` keeps the first `N` couplings.
    pub modes: Vec<usize>,
    pub couplings: Vec<f64>,
    pub fock_dim: usize,
    pub max_fock_dim: usize,
    /// Relative MSE change below which the truncation ladder stops.
    pub convergence_tol: f64,
    /// Independent runs per point (spread of the mean MSE).
    pub runs: usize,
}

impl Default for MultilevelConfig {
    fn default() -> Self {
        Self {
            omega: 1e-2,
            modes: vec![1, 2, 3],
            couplings: vec![10.0, 2.5, 1.25],
            fock_dim: 8,
            max_fock_dim: 32,
            convergence_tol: 1e-6,
            runs: 10,
        }
    }
}

/// Full experiment description, deserialized from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub omega: OmegaSpec,
    pub g: f64,
    /// Interrogation time; overridden by `t_over_pi` when that is set.
    pub t: Option<f64>,
    pub t_over_pi: Option<f64>,
    /// Shots per experiment.
    pub nu: u64,
    /// Experiments per point.
    pub repetitions: usize,
    pub epsilons: EpsilonGrid,
    pub distribution: DistributionFamily,
    pub strategies: Vec<StrategySpec>,
    pub include_if_reference: bool,
    pub seed: u64,
    pub mode: Mode,
    pub draw_scheme: DrawScheme,
    pub sharing: Sharing,
    pub nodes: NodePolicy,
    pub threads: Option<usize>,
    pub worst_case: WorstCaseConfig,
    pub multilevel: MultilevelConfig,
    pub out_dir: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            omega: OmegaSpec::default(),
            g: 10.0,
            t: None,
            t_over_pi: Some(80.0),
            nu: 10_000,
            repetitions: 100,
            epsilons: EpsilonGrid::default(),
            distribution: DistributionFamily::Uniform,
            strategies: vec![
                StrategySpec::FeSwap,
                StrategySpec::CeSwap {
                    control: ControlModel::Physical,
                },
            ],
            include_if_reference: true,
            seed: 0,
            mode: Mode::MonteCarlo,
            draw_scheme: DrawScheme::PerShot,
            sharing: Sharing::Independent,
            nodes: NodePolicy::default(),
            threads: None,
            worst_case: WorstCaseConfig::default(),
            multilevel: MultilevelConfig::default(),
            out_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn interrogation_time(&self) -> f64 {
        match (self.t_over_pi, self.t) {
            (Some(k), _) => k * PI,
            (None, Some(t)) => t,
            (None, None) => 80.0 * PI,
        }
    }

    pub fn params(&self, omega: f64) -> PhysicalParams {
        PhysicalParams {
            omega,
            g: self.g,
            t: self.interrogation_time(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nu < 1 {
            return Err(Error::Config("nu must be at least 1".into()));
        }
        if self.repetitions < 1 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        let eps = self.epsilons.values();
        if eps.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(Error::Config(format!(
                "epsilon grid {eps:?} must be finite and non-negative"
            )));
        }
        if eps.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(format!(
                "epsilon grid {eps:?} must be strictly increasing"
            )));
        }
        match &self.omega {
            OmegaSpec::Fixed(w) if !w.is_finite() => {
                return Err(Error::Config("omega must be finite".into()))
            }
            OmegaSpec::Range { low, high, samples } if !(low <= high) || *samples == 0 => {
                return Err(Error::Config(format!(
                    "omega range [{low}, {high}] with {samples} samples"
                )))
            }
            _ => {}
        }
        self.params(self.omega.representative()).validate()?;
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        for s in &self.strategies {
            if let StrategySpec::FeMultilevel { env, .. } | StrategySpec::CeMultilevel { env, .. } =
                s
            {
                env.validate()?;
            }
        }
        let ml = &self.multilevel;
        if ml.runs == 0 || ml.fock_dim < 2 || ml.max_fock_dim < ml.fock_dim {
            return Err(Error::Config(
                "multilevel needs runs ≥ 1 and 2 ≤ fock_dim ≤ max_fock_dim".into(),
            ));
        }
        if ml.modes.iter().any(|&n| n == 0 || n > ml.couplings.len()) {
            return Err(Error::Config(format!(
                "multilevel modes {:?} exceed {} couplings",
                ml.modes,
                ml.couplings.len()
            )));
        }
        EnvironmentSpec::PhononModes {
            fock_dim: ml.fock_dim,
            couplings: ml.couplings.clone(),
        }
        .validate()?;
        Ok(())
    }
}
