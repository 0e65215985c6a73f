//! Time-domain imperfections: every timed operation `t` runs for `t(1+u)`
//! with `u` drawn from a distribution supported on `[-ε, ε]`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::C64;

/// Weights must sum to one within this tolerance.
pub const WEIGHT_TOL: f64 = 1e-12;

/// Bounded dilation law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TdiDistribution {
    /// Point mass at `xi`, `|xi| ≤ epsilon`.
    Delta {
        xi: f64,
        epsilon: f64,
    },
    Uniform {
        epsilon: f64,
    },
    DiscreteGrid {
        points: Vec<f64>,
        weights: Vec<f64>,
        epsilon: f64,
    },
}

impl TdiDistribution {
    pub fn delta(xi: f64, epsilon: f64) -> Result<Self> {
        let d = Self::Delta { xi, epsilon };
        d.validate()?;
        Ok(d)
    }

    /// Point mass at `xi` with the tightest support bound.
    pub fn point(xi: f64) -> Self {
        Self::Delta {
            xi,
            epsilon: xi.abs(),
        }
    }

    pub fn uniform(epsilon: f64) -> Result<Self> {
        let d = Self::Uniform { epsilon };
        d.validate()?;
        Ok(d)
    }

    pub fn discrete(points: Vec<f64>, weights: Vec<f64>, epsilon: f64) -> Result<Self> {
        let d = Self::DiscreteGrid {
            points,
            weights,
            epsilon,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn support_bound(&self) -> f64 {
        match self {
            Self::Delta { epsilon, .. }
            | Self::Uniform { epsilon }
            | Self::DiscreteGrid { epsilon, .. } => *epsilon,
        }
    }

    /// Checks the support and weight invariants.
    pub fn validate(&self) -> Result<()> {
        let eps = self.support_bound();
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::InvalidTdi(format!("support bound {eps}")));
        }
        let in_support = |u: f64| u.is_finite() && u.abs() <= eps;
        match self {
            Self::Delta { xi, .. } => {
                if !in_support(*xi) {
                    return Err(Error::InvalidTdi(format!(
                        "xi = {xi} outside [-{eps}, {eps}]"
                    )));
                }
            }
            Self::Uniform { .. } => {}
            Self::DiscreteGrid {
                points, weights, ..
            } => {
                if points.is_empty() || points.len() != weights.len() {
                    return Err(Error::InvalidTdi(format!(
                        "{} points with {} weights",
                        points.len(),
                        weights.len()
                    )));
                }
                if let Some(u) = points.iter().find(|&&u| !in_support(u)) {
                    return Err(Error::InvalidTdi(format!(
                        "point {u} outside [-{eps}, {eps}]"
                    )));
                }
                if weights.iter().any(|&w| !(w.is_finite() && w >= 0.0)) {
                    return Err(Error::InvalidTdi("negative weight".into()));
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > WEIGHT_TOL {
                    return Err(Error::InvalidTdi(format!("weights sum to {total}")));
                }
            }
        }
        Ok(())
    }

    /// Draws `n` i.i.d. dilations.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> DilationDraw {
        let values = match self {
            Self::Delta { xi, .. } => vec![*xi; n],
            Self::Uniform { epsilon } if *epsilon == 0.0 => vec![0.0; n],
            Self::Uniform { epsilon } => (0..n)
                .map(|_| rng.random_range(-*epsilon..=*epsilon))
                .collect(),
            Self::DiscreteGrid {
                points, weights, ..
            } => {
                let idx = WeightedIndex::new(weights).expect("validated weights");
                (0..n).map(|_| points[idx.sample(rng)]).collect()
            }
        };
        let eps = self.support_bound();
        assert!(
            values.iter().all(|u| u.abs() <= eps),
            "dilation sample escaped its support"
        );
        DilationDraw {
            values,
            epsilon: eps,
        }
    }

    /// Quadrature rule `(u, weight)` for `∫ f(u)·φ(u) du`. Gauss–Legendre
    /// with `nodes` points for the uniform law, the atoms otherwise.
    pub fn rule(&self, nodes: usize) -> Vec<(f64, f64)> {
        match self {
            Self::Delta { xi, .. } => vec![(*xi, 1.0)],
            Self::Uniform { epsilon } if *epsilon == 0.0 => vec![(0.0, 1.0)],
            Self::Uniform { epsilon } => {
                let (x, w) = gauss_legendre(nodes.max(1));
                x.into_iter()
                    .zip(w)
                    .map(|(x, w)| (x * epsilon, w / 2.0))
                    .collect()
            }
            Self::DiscreteGrid {
                points, weights, ..
            } => points
                .iter()
                .copied()
                .zip(weights.iter().copied())
                .filter(|&(_, w)| w > 0.0)
                .collect(),
        }
    }

    /// `∫ f(u)·integrand(u) du`.
    pub fn quadrature<F: FnMut(f64) -> f64>(&self, mut integrand: F, nodes: usize) -> f64 {
        self.rule(nodes)
            .into_iter()
            .map(|(u, w)| w * integrand(u))
            .sum()
    }

    /// `E[exp(-i·a·u)]`, in closed form.
    pub fn characteristic(&self, a: f64) -> C64 {
        match self {
            Self::Delta { xi, .. } => C64::from_polar(1.0, -a * xi),
            Self::Uniform { epsilon } => {
                let x = a * epsilon;
                C64::new(if x == 0.0 { 1.0 } else { x.sin() / x }, 0.0)
            }
            Self::DiscreteGrid {
                points, weights, ..
            } => points
                .iter()
                .zip(weights)
                .map(|(&u, &w)| C64::from_polar(w, -a * u))
                .sum(),
        }
    }

    pub fn mean(&self) -> f64 {
        self.quadrature(|u| u, 2)
    }

    /// Whether every draw is the same number, so per-operation independence
    /// is irrelevant.
    pub fn is_degenerate(&self) -> bool {
        match self {
            Self::Delta { .. } => true,
            Self::Uniform { epsilon } => *epsilon == 0.0,
            Self::DiscreteGrid { weights, .. } => weights.iter().filter(|&&w| w > 0.0).count() == 1,
        }
    }
}

/// One dilation per timed operation of a strategy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilationDraw {
    pub values: Vec<f64>,
    pub epsilon: f64,
}

impl DilationDraw {
    /// All operations run at nominal duration.
    pub fn nominal(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
            epsilon: 0.0,
        }
    }

    pub fn uniform_value(n: usize, u: f64) -> Self {
        Self {
            values: vec![u; n],
            epsilon: u.abs(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Actual duration of a nominal interval `t` under dilation `u`.
pub fn dilate(t: f64, u: f64) -> f64 {
    t * (1.0 + u)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}
