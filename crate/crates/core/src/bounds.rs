//! Closed-form bounds: Fisher-information envelopes, biased Cramér–Rao
//! bounds, FE loss floors, and the CE loss and bias ceilings.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PhysicalParams;
use crate::strategies::cnot_fit;

/// `|sin(ωT′)|` below which `csc(ωT′)` is treated as singular.
pub const CSC_FLOOR: f64 = 1e-6;
/// `|a|` below which the Kraus bound switches to its limit expression.
pub const KRAUS_DEGENERATE: f64 = 1e-12;
/// Largest η for which the leading-order CE bounds are reported as valid.
pub const ETA_EXPANSION_LIMIT: f64 = 0.1;

/// Residual systematic error `ε²ω²` with no environment at all.
pub fn hardware_limit(eps: f64, omega: f64) -> f64 {
    (eps * omega).powi(2)
}

/// Interaction-free reference MSE `1/(νT²) + ε²ω²`.
pub fn if_reference(nu: f64, t: f64, eps: f64, omega: f64) -> f64 {
    1.0 / (nu * t * t) + hardware_limit(eps, omega)
}

/// `(1 + ∂b/∂ω)²/(νF) + b²`.
pub fn biased_crb(fisher: f64, nu: f64, bias: f64, dbias: f64) -> Result<f64> {
    if !(fisher > 0.0) {
        return Err(Error::NonpositiveFisher(fisher));
    }
    Ok((1.0 + dbias).powi(2) / (nu * fisher) + bias * bias)
}

/// Minimum of the biased CRB over linear bias `b = m(ω − ω₀)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalBias {
    pub mse: f64,
    pub m_star: f64,
}

/// `1/(νF + (ω−ω₀)⁻²)` with slope `m* = −1/(1 + νF(ω₀−ω)²)`. At `ω = ω₀`
/// the estimator can be pinned to the truth and the bound is 0.
pub fn opt_bias_mse_lower(fisher: f64, nu: f64, omega: f64, omega0: f64) -> Result<OptimalBias> {
    if !(fisher > 0.0) {
        return Err(Error::NonpositiveFisher(fisher));
    }
    let d2 = (omega - omega0).powi(2);
    let nf = nu * fisher;
    if d2 == 0.0 {
        return Ok(OptimalBias {
            mse: 0.0,
            m_star: -1.0,
        });
    }
    Ok(OptimalBias {
        mse: d2 / (nf * d2 + 1.0),
        m_star: -1.0 / (1.0 + nf * d2),
    })
}

/// Kraus amplitudes of the system channel `ρ ↦ Tr_E[U(ρ⊗|0⟩⟨0|)U†]` and
/// their ω-derivatives: `K₁ = diag(b, c)`, `K₂ = a·|0⟩⟨1|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrausPair {
    pub a: (f64, f64),
    pub b: (f64, f64),
    pub c: (f64, f64),
    pub da: (f64, f64),
    pub db: (f64, f64),
    pub dc: (f64, f64),
}

type Cx = (f64, f64);

fn cmul(x: Cx, y: Cx) -> Cx {
    (x.0 * y.0 - x.1 * y.1, x.0 * y.1 + x.1 * y.0)
}

fn conj(x: Cx) -> Cx {
    (x.0, -x.1)
}

fn norm2(x: Cx) -> f64 {
    x.0 * x.0 + x.1 * x.1
}

impl KrausPair {
    /// Amplitudes after an interrogation of `T(1+ξ)`.
    pub fn new(p: &PhysicalParams, xi: f64) -> Self {
        let tau = p.t * (1.0 + xi);
        let (w, g) = (p.omega, p.g);
        let big = p.big_omega();
        let dbig = w / (4.0 * big);
        let (s, co) = ((tau * big).sin(), (tau * big).cos());
        let phase = -tau * (2.0 * g + w) / 2.0;
        let b = (phase.cos(), phase.sin());
        let db = cmul((0.0, -tau / 2.0), b);
        let c = (co, w * s / (2.0 * big));
        let dc = (
            -tau * s * dbig,
            s / (2.0 * big) + w * (tau * co * dbig / (2.0 * big) - s * dbig / (2.0 * big * big)),
        );
        let a = (0.0, -g * s / big);
        let da = (0.0, -g * (tau * co * dbig / big - s * dbig / (big * big)));
        Self {
            a,
            b,
            c,
            da,
            db,
            dc,
        }
    }

    /// `|b|² + |a|² + |c|² − 2`, zero for a trace-preserving pair.
    pub fn completeness_defect(&self) -> f64 {
        norm2(self.b) + norm2(self.a) + norm2(self.c) - 2.0
    }

    /// `min_h Σ_j ‖K̇_j − iΣ_k h_jk K_k‖²_F` over Hermitian `h`.
    pub fn min_trace(&self) -> f64 {
        let na = norm2(self.a);
        let first = if na.sqrt() < KRAUS_DEGENERATE {
            norm2(self.da)
        } else {
            cmul(conj(self.a), self.da).0.powi(2) / na
        };
        let n = norm2(self.b) + norm2(self.c);
        let im = cmul(conj(self.b), self.db).1 + cmul(conj(self.c), self.dc).1;
        let second = norm2(self.db) + norm2(self.dc) - im * im / n;
        first + second
    }
}

/// Channel QFI bound `4·min_h Tr A` for an FE interrogation dilated by `ξ`.
pub fn kraus_qfi_min(p: &PhysicalParams, xi: f64) -> f64 {
    4.0 * KrausPair::new(p, xi).min_trace()
}

/// Leading FE QFI term `2T²(1+ξ)²cos²(TΩ(1+ξ))/(cos(2TΩ(1+ξ)) + 3)`.
pub fn qfi_fe_upper(p: &PhysicalParams, xi: f64) -> f64 {
    let tt = p.t * (1.0 + xi);
    let arg = tt * p.big_omega();
    2.0 * tt * tt * arg.cos().powi(2) / ((2.0 * arg).cos() + 3.0)
}

/// Leading term plus the `ω²T²/g²` correction.
pub fn qfi_fe_envelope(p: &PhysicalParams, xi: f64) -> f64 {
    qfi_fe_upper(p, xi) + (p.omega * p.t * (1.0 + xi) / p.g).powi(2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `ε ≥ ε*`: decoupling timing fully randomized.
    AboveThreshold,
    BelowThreshold,
}

/// FE loss floor and the regime it was evaluated in.
pub fn loss_fe_lower(p: &PhysicalParams, nu: f64, eps: f64) -> (f64, Regime) {
    let (w, g, t) = (p.omega, p.g, p.t);
    if eps >= p.eps_star() {
        (
            g * g * w * w / (nu * w.powi(4) * t * t + g * g),
            Regime::AboveThreshold,
        )
    } else {
        let c = (eps * t * p.big_omega()).cos().powi(2);
        (
            1.0 / (nu * t * t * (w * w / (g * g) + c) + 1.0 / (w * w)),
            Regime::BelowThreshold,
        )
    }
}

/// Error budget of the CE circuit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    /// Phase of the preparation layer.
    pub phi_c0: f64,
    /// Phase of the first control.
    pub phi_c1: f64,
    pub eps_prime: f64,
    /// Leakage while the interaction segments also feel the system term.
    pub eps1: f64,
    /// Dilation of the long precession plus preparation and first control.
    pub eps2: f64,
    /// Second control, readout and the closing interaction segment.
    pub eps3: f64,
    pub eta: f64,
}

impl ErrorBudget {
    pub fn new(p: &PhysicalParams, eps: f64) -> Self {
        let phi_c0 = PI / 2.0;
        let phi_c1 = PI / 2.0 + PI / 4.0;
        let eps_prime = eps * PI / 4.0 + eps * (phi_c0 + phi_c1);
        let eps1 = 3.0 * PI * p.omega.abs() / (8.0 * p.g);
        let eps2 = eps * p.omega.abs() * p.t_prime() / 2.0 + eps_prime;
        let eps3 = eps * PI / 2.0 + 3.0 * PI * eps / 4.0;
        Self {
            phi_c0,
            phi_c1,
            eps_prime,
            eps1,
            eps2,
            eps3,
            eta: eps1 + eps2 + eps3,
        }
    }

    /// `3π|ω|/(8g) + 11πε/4 + ε|ω|T′/2`.
    pub fn closed_form(p: &PhysicalParams, eps: f64) -> f64 {
        3.0 * PI * p.omega.abs() / (8.0 * p.g)
            + 11.0 * PI * eps / 4.0
            + eps * p.omega.abs() * p.t_prime() / 2.0
    }

    pub fn expansion_valid(&self) -> bool {
        self.eta < ETA_EXPANSION_LIMIT
    }
}

fn csc_omega_t_prime(p: &PhysicalParams) -> Result<f64> {
    let s = (p.omega * p.t_prime()).sin();
    if s.abs() < CSC_FLOOR {
        return Err(Error::CscSingularity(s.abs()));
    }
    Ok(1.0 / s)
}

/// `4|csc(ωT′)|η/T′`.
pub fn ce_bias_bound(p: &PhysicalParams, eps: f64) -> Result<f64> {
    let csc = csc_omega_t_prime(p)?;
    Ok(4.0 * csc.abs() * ErrorBudget::new(p, eps).eta / p.t_prime())
}

/// `1/(νT′²) + 16csc²(ωT′)η²/T′²`, higher orders in η dropped.
pub fn loss_ce_upper(p: &PhysicalParams, nu: f64, eps: f64) -> Result<f64> {
    let csc = csc_omega_t_prime(p)?;
    let tp = p.t_prime();
    let eta = ErrorBudget::new(p, eps).eta;
    Ok(1.0 / (nu * tp * tp) + 16.0 * csc * csc * eta * eta / (tp * tp))
}

/// `8ε(|ω|T/2 + φ_ctrl)/(T√(1 − 4⟨O⟩²))` for the fitted CNOT protocol.
pub fn cnot_bias_bound(p: &PhysicalParams, eps: f64, o_ce: f64) -> Result<f64> {
    if !(o_ce.abs() < 0.5) {
        return Err(Error::DomainEdge(o_ce));
    }
    let phases = p.omega.abs() * p.t / 2.0 + cnot_fit::CONTROL_PHASE;
    Ok(8.0 * eps * phases / (p.t * (1.0 - 4.0 * o_ce * o_ce).sqrt()))
}

/// Every closed-form quantity at one `(p, ν, ε)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub omega: f64,
    pub g: f64,
    pub t: f64,
    pub nu: f64,
    pub epsilon: f64,
    pub eps_star: f64,
    pub regime: Regime,
    pub hardware_limit: f64,
    pub if_reference: f64,
    pub qfi_fe_upper: Vec<(f64, f64)>,
    pub kraus_qfi: Vec<(f64, f64)>,
    pub loss_fe_lower: f64,
    pub loss_ce_upper: Option<f64>,
    pub ce_bias_bound: Option<f64>,
    pub eta: f64,
    pub eta_expansion_valid: bool,
    pub opt_bias_lower: f64,
}

impl BoundReport {
    /// `xi_points` grid points spread evenly over `[-ε, ε]`.
    pub fn new(p: &PhysicalParams, nu: f64, eps: f64, xi_points: usize) -> Self {
        let xis: Vec<f64> = match xi_points {
            0 => vec![],
            1 => vec![0.0],
            n => (0..n)
                .map(|i| -eps + 2.0 * eps * i as f64 / (n - 1) as f64)
                .collect(),
        };
        let (loss_fe, regime) = loss_fe_lower(p, nu, eps);
        let budget = ErrorBudget::new(p, eps);
        let fe_qfi_worst = xis
            .iter()
            .map(|&x| kraus_qfi_min(p, x))
            .fold(f64::INFINITY, f64::min);
        let fisher = if fe_qfi_worst.is_finite() {
            fe_qfi_worst
        } else {
            kraus_qfi_min(p, 0.0)
        };
        let opt_bias_lower = opt_bias_mse_lower(fisher.max(f64::MIN_POSITIVE), nu, p.omega, 0.0)
            .map(|o| o.mse)
            .unwrap_or(0.0);
        Self {
            omega: p.omega,
            g: p.g,
            t: p.t,
            nu,
            epsilon: eps,
            eps_star: p.eps_star(),
            regime,
            hardware_limit: hardware_limit(eps, p.omega),
            if_reference: if_reference(nu, p.t, eps, p.omega),
            qfi_fe_upper: xis.iter().map(|&x| (x, qfi_fe_upper(p, x))).collect(),
            kraus_qfi: xis.iter().map(|&x| (x, kraus_qfi_min(p, x))).collect(),
            loss_fe_lower: loss_fe,
            loss_ce_upper: loss_ce_upper(p, nu, eps).ok(),
            ce_bias_bound: ce_bias_bound(p, eps).ok(),
            eta: budget.eta,
            eta_expansion_valid: budget.expansion_valid(),
            opt_bias_lower,
        }
    }

    pub fn all_finite_nonnegative(&self) -> bool {
        let scalars = [
            self.hardware_limit,
            self.if_reference,
            self.loss_fe_lower,
            self.eta,
            self.opt_bias_lower,
            self.loss_ce_upper.unwrap_or(0.0),
            self.ce_bias_bound.unwrap_or(0.0),
        ];
        scalars
            .iter()
            .chain(self.qfi_fe_upper.iter().map(|x| &x.1))
            .chain(self.kraus_qfi.iter().map(|x| &x.1))
            .all(|v| v.is_finite() && *v >= 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reference() -> PhysicalParams {
        PhysicalParams::reference()
    }

    #[test]
    fn hardware_limit_examples() {
        assert_eq!(hardware_limit(0.0, 0.3), 0.0);
        assert!((hardware_limit(1e-3, 1.0 / 300.0) / 1.111_111_111_111e-11 - 1.0).abs() < 1e-10);
        let t = 80.0 * PI;
        assert!((if_reference(1e4, t, 0.0, 1.0 / 300.0) / 1.5832e-9 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn biased_crb_special_cases() {
        assert!((biased_crb(4.0, 10.0, 0.0, 0.0).unwrap() - 1.0 / 40.0).abs() < 1e-15);
        assert_eq!(biased_crb(4.0, 10.0, 0.3, -1.0).unwrap(), 0.09);
        assert!(matches!(
            biased_crb(0.0, 10.0, 0.0, 0.0),
            Err(Error::NonpositiveFisher(_))
        ));
    }

    #[test]
    fn biased_crb_matches_gaussian_linear_estimator() {
        // x̄ of ν draws from N(ω, σ²), estimator (1+k)x̄ + c: MSE is exact
        let (omega, sigma, nu) = (0.7, 0.4, 25.0);
        for &(k, c) in &[(0.0, 0.0), (-0.3, 0.05), (0.2, -0.1)] {
            let mse =
                (1.0 + k) * (1.0f64 + k) * sigma * sigma / nu + (k * omega + c) * (k * omega + c);
            let crb = biased_crb(1.0 / (sigma * sigma), nu, k * omega + c, k).unwrap();
            assert!((mse - crb).abs() < 1e-12);
        }
    }

    #[test]
    fn opt_bias_limits_and_scan() {
        let big = opt_bias_mse_lower(1e16, 1.0, 0.1, 0.0).unwrap();
        assert!((big.mse * 1e16 - 1.0).abs() < 1e-10);
        let small = opt_bias_mse_lower(1e-12, 1.0, 0.1, 0.0).unwrap();
        assert!((small.mse / 0.01 - 1.0).abs() < 1e-10);
        let (f, nu, d) = (1.0, 100.0, 0.1);
        let closed = opt_bias_mse_lower(f, nu, d, 0.0).unwrap();
        let grid_min = (0..=100_000)
            .map(|i| -1.0 + i as f64 * 1e-5)
            .map(|m| biased_crb(f, nu, m * d, m).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!((grid_min - closed.mse).abs() < 1e-9);
        assert!(
            (biased_crb(f, nu, closed.m_star * d, closed.m_star).unwrap() - closed.mse).abs()
                < 1e-15
        );
        assert_eq!(opt_bias_mse_lower(1.0, 1.0, 0.2, 0.2).unwrap().mse, 0.0);
    }

    #[test]
    fn kraus_pair_is_trace_preserving() {
        for xi in [-1e-3, 0.0, 6.25e-4] {
            assert!(KrausPair::new(&reference(), xi).completeness_defect().abs() < 1e-12);
        }
    }

    #[test]
    fn kraus_derivatives_match_finite_differences() {
        let p = PhysicalParams {
            omega: 0.3,
            g: 2.0,
            t: 3.0,
        };
        let h = 1e-6;
        let k0 = KrausPair::new(&p, 0.01);
        let kp = KrausPair::new(&p.with_omega(p.omega + h), 0.01);
        let km = KrausPair::new(&p.with_omega(p.omega - h), 0.01);
        let fd = |f: fn(&KrausPair) -> Cx| {
            let (a, b) = (f(&kp), f(&km));
            ((a.0 - b.0) / (2.0 * h), (a.1 - b.1) / (2.0 * h))
        };
        for (num, ana) in [
            (fd(|k| k.a), k0.da),
            (fd(|k| k.b), k0.db),
            (fd(|k| k.c), k0.dc),
        ] {
            assert!(
                (num.0 - ana.0).abs() < 1e-7 && (num.1 - ana.1).abs() < 1e-7,
                "{num:?} vs {ana:?}"
            );
        }
    }

    #[test]
    fn kraus_bound_near_envelope_at_reference() {
        let p = reference();
        let k = kraus_qfi_min(&p, 0.0);
        let env = qfi_fe_envelope(&p, 0.0);
        let slack = (p.omega * p.t / p.g).powi(2) + 1.0 / (p.g * p.g);
        assert!((k - env).abs() <= slack, "{k} vs {env}");
        // and it dominates the Bell-probe protocol's T²/4
        assert!(k >= p.t * p.t / 4.0);
    }

    #[test]
    fn kraus_residual_at_zero_frequency() {
        // ω = 0 with TΩ an odd multiple of π/2: only the 1/g²-scale residual survives
        let g = 10.0;
        let p = PhysicalParams {
            omega: 0.0,
            g,
            t: 80.5 * PI / g,
        };
        assert!(kraus_qfi_min(&p, 0.0) <= 8.0 / (g * g));
    }

    #[test]
    fn qfi_leading_term_examples() {
        let p = reference();
        // exact at ω = 0, shifted by ω²/(8g²) relative otherwise
        assert!((p.with_omega(0.0).eps_star() - 6.25e-4).abs() < 1e-18);
        assert!((p.eps_star() / 6.25e-4 - 1.0).abs() < 2e-8);
        let p0 = p.with_omega(0.0);
        assert!(qfi_fe_upper(&p0, p0.eps_star()) < 1e-20 * p.t * p.t);
        assert!((qfi_fe_upper(&p, 0.0) / (p.t * p.t / 2.0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn loss_fe_lower_examples() {
        let p = reference();
        let (v, r) = loss_fe_lower(&p, 1e4, 1e-3);
        assert_eq!(r, Regime::AboveThreshold);
        let w2 = p.omega * p.omega;
        assert!((v / (w2 * 100.0 / (100.0 + 1e4 * w2 * w2 * p.t * p.t)) - 1.0).abs() < 1e-12);
        assert!((v / w2 - 1.0).abs() < 1e-3);
        let (v0, r0) = loss_fe_lower(&p, 1e4, 0.0);
        assert_eq!(r0, Regime::BelowThreshold);
        let expect = 1.0 / (1e4 * p.t * p.t * (1.0 + w2 / 100.0) + 1.0 / w2);
        assert!((v0 / expect - 1.0).abs() < 1e-12);
        // approaching ε* from below the companion expression tends to 1/(νT²ω²/g² + 1/ω²)
        let (vl, _) = loss_fe_lower(&p, 1e4, p.eps_star() * (1.0 - 1e-9));
        let limit = 1.0 / (1e4 * p.t * p.t * w2 / 100.0 + 1.0 / w2);
        assert!((vl / limit - 1.0).abs() < 1e-6);
        // the two branches agree to leading order in νω⁴T²/g²
        assert!((vl / v - 1.0).abs() < 2.0 * 1e4 * w2 * w2 * p.t * p.t / 100.0);
    }

    #[test]
    fn error_budget_reference_values() {
        let p = reference();
        assert!((p.t_prime() - 251.09179).abs() < 1e-5);
        let b = ErrorBudget::new(&p, 1e-4);
        assert!((b.eps1 - 3.927e-4).abs() < 1e-7);
        assert!((11.0 * PI * 1e-4 / 4.0 - 8.639e-4).abs() < 1e-7);
        assert!((b.eta - 1.299e-3).abs() < 1e-6);
        assert!(b.expansion_valid());
        assert!((b.phi_c0 + b.phi_c1 - 5.0 * PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn ce_bias_bound_examples() {
        let p = reference();
        assert!(((p.omega * p.t_prime()) - 0.8370).abs() < 1e-4);
        let b = ce_bias_bound(&p, 1e-4).unwrap();
        let expect =
            4.0 / (p.omega * p.t_prime()).sin() * ErrorBudget::closed_form(&p, 1e-4) / p.t_prime();
        assert!((b - expect).abs() < 1e-18);
        let strong = PhysicalParams { g: 1e9, ..p };
        assert!(ce_bias_bound(&strong, 0.0).unwrap() < 1e-12);
        let sing = p.with_omega(PI / p.t_prime());
        assert!(matches!(
            ce_bias_bound(&sing, 1e-4),
            Err(Error::CscSingularity(_))
        ));
        assert!(matches!(
            loss_ce_upper(&sing, 1e4, 1e-4),
            Err(Error::CscSingularity(_))
        ));
    }

    #[test]
    fn loss_ce_upper_limits() {
        let p = PhysicalParams {
            g: 1e12,
            ..reference()
        };
        let v = loss_ce_upper(&p, 1e4, 0.0).unwrap();
        assert!((v * 1e4 * p.t_prime().powi(2) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cnot_bias_bound_examples() {
        let p = PhysicalParams {
            omega: 0.01,
            ..reference()
        };
        assert_eq!(cnot_bias_bound(&p, 0.0, 0.1).unwrap(), 0.0);
        let at0 = cnot_bias_bound(&p, 1e-4, 0.0).unwrap();
        assert!((at0 - 8e-4 * (0.01 * p.t / 2.0 + 4.366657005) / p.t).abs() < 1e-18);
        let v = cnot_bias_bound(&p, 1e-4, 0.25).unwrap();
        assert!(v.is_finite() && v > at0);
        assert!(matches!(
            cnot_bias_bound(&p, 1e-4, 0.5),
            Err(Error::DomainEdge(_))
        ));
    }

    #[test]
    fn report_is_finite() {
        let r = BoundReport::new(&reference(), 1e4, 1e-3, 21);
        assert!(r.all_finite_nonnegative());
        assert_eq!(r.qfi_fe_upper.len(), 21);
        assert_eq!(r.regime, Regime::AboveThreshold);
    }

    proptest! {
        #[test]
        fn eta_identity(omega in -0.1..0.1f64, g in 1.0..100.0f64, t in 10.0..1000.0f64, eps in 0.0..1e-2f64) {
            let p = PhysicalParams { omega, g, t };
            let b = ErrorBudget::new(&p, eps);
            prop_assert!((b.eta - ErrorBudget::closed_form(&p, eps)).abs() < 1e-14);
        }

        #[test]
        fn leading_qfi_bounded(omega in -0.1..0.1f64, g in 1.0..100.0f64, t in 10.0..1000.0f64, eps in 0.0..1e-2f64, s in -1.0..1.0f64) {
            let p = PhysicalParams { omega, g, t };
            prop_assert!(qfi_fe_upper(&p, s * eps) <= 2.0 * t * t * (1.0 + eps).powi(2) * (1.0 + 1e-12));
        }

        #[test]
        fn opt_bias_is_minimum_over_slopes(f in 0.01..100.0f64, nu in 1.0..1e4f64, d in 1e-4..1.0f64, m in -2.0..1.0f64) {
            let o = opt_bias_mse_lower(f, nu, d, 0.0).unwrap();
            prop_assert!(o.mse <= biased_crb(f, nu, m * d, m).unwrap() * (1.0 + 1e-12));
        }

        #[test]
        fn kraus_bound_dominates_bell_protocol(k in 1u32..200, omega in 1e-3..1e-2f64) {
            // at decoupling times gT = kπ the Bell probe reaches T²/4
            let g = 10.0;
            let p = PhysicalParams { omega, g, t: k as f64 * PI / g + 1.0 };
            let p = PhysicalParams { t: (p.t * g / PI).round() * PI / g, ..p };
            prop_assert!(kraus_qfi_min(&p, 0.0) >= p.t * p.t / 4.0 * (1.0 - 1e-6));
        }
    }
}
