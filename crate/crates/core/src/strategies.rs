//! Free-evolution (FE) and control-enhanced (CE) protocols as sequences of
//! timed operations, and their execution under dilations.
//!
//! Every segment is one timed operation consuming one dilation `u`: a pulse
//! scales its gate phases by `1+u`, a precession scales its duration. Pulses
//! are instantaneous and the drift Hamiltonian is frozen while they act.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, embed, gates, EnvironmentSpec, Gate, PhysicalParams};
use crate::qcore::{
    pauli, CMatrix, CVector, DensityMatrix, Kron, Operator, Spectrum, StateVector, C64,
};
use crate::tdi::{DilationDraw, TdiDistribution};

/// Residual allowed in the decoupling condition at the FE measurement time.
pub const DECOUPLING_TOL: f64 = 1e-9;

/// Fitted CNOT control-enhanced estimator constants.
pub mod cnot_fit {
    pub const SCALE: f64 = 0.99443;
    pub const AMPLITUDE: f64 = 0.499971519;
    pub const OFFSET: f64 = 197.427242;
    /// Bound on the total control phase of the fitted circuit.
    pub const CONTROL_PHASE: f64 = 4.366657005;
}

/// Quadrature nodes for one segment: a base count plus enough to resolve the
/// largest phase spread the dilation can produce.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodePolicy {
    pub base: usize,
    pub per_radian: f64,
    pub max: usize,
}

impl Default for NodePolicy {
    fn default() -> Self {
        Self {
            base: 8,
            per_radian: 1.0,
            max: 4096,
        }
    }
}

impl NodePolicy {
    pub fn nodes(&self, phase_spread: f64, epsilon: f64) -> usize {
        let extra = (self.per_radian * phase_spread * epsilon).ceil() as usize;
        (self.base + extra).min(self.max)
    }
}

/// Whether the timed operations of a run draw independently or share one draw.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sharing {
    #[default]
    Independent,
    Shared,
}

/// What the two short interaction segments of the CE-SWAP circuit evolve under.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlModel {
    /// Full Hamiltonian, including the system term.
    #[default]
    Physical,
    /// Interaction only (perfect control).
    Ideal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    Pulse,
    Precession,
}

/// `exp(-i·phase·(1+u)·A)` with `A` pre-diagonalized.
#[derive(Clone, Debug)]
struct Step {
    spectrum: Spectrum,
    phase: f64,
}

impl Step {
    fn unitary(&self, u: f64) -> CMatrix {
        self.spectrum.exp_matrix(self.phase * (1.0 + u))
    }

    fn phase_spread(&self) -> f64 {
        self.spectrum.spread() * self.phase.abs()
    }
}

/// One timed operation.
#[derive(Clone, Debug)]
pub struct Segment {
    pub label: String,
    pub kind: SegmentKind,
    /// Phase budget for pulses, duration for precessions.
    pub nominal: f64,
    steps: Vec<Step>,
}

impl Segment {
    /// Gates applied in order, all dilated by the same draw.
    pub fn pulse(label: &str, gates: &[Gate]) -> Result<Self> {
        let steps = gates
            .iter()
            .map(|g| {
                Ok(Step {
                    spectrum: Spectrum::of(&g.generator)?,
                    phase: g.phase,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let nominal = gates.iter().map(|g| g.phase.abs()).fold(0.0, f64::max);
        Ok(Self {
            label: label.into(),
            kind: SegmentKind::Pulse,
            nominal,
            steps,
        })
    }

    pub fn precession(label: &str, h: &Operator, duration: f64) -> Result<Self> {
        if duration < 0.0 {
            return Err(Error::InvalidParams(format!(
                "negative duration {duration}"
            )));
        }
        Ok(Self {
            label: label.into(),
            kind: SegmentKind::Precession,
            nominal: duration,
            steps: vec![Step {
                spectrum: Spectrum::of(h)?,
                phase: duration,
            }],
        })
    }

    pub fn unitary(&self, u: f64) -> CMatrix {
        let mut steps = self.steps.iter();
        let first = steps
            .next()
            .expect("segments have at least one step")
            .unitary(u);
        steps.fold(first, |acc, s| s.unitary(u) * acc)
    }

    pub fn phase_spread(&self) -> f64 {
        self.steps.iter().map(Step::phase_spread).sum()
    }

    /// Eigenvalues and duration of a precession under a diagonal Hamiltonian.
    fn diagonal(&self) -> Option<(&[f64], f64)> {
        match self.steps.as_slice() {
            [s] if s.spectrum.is_diagonal() => Some((&s.spectrum.values, s.phase)),
            _ => None,
        }
    }

    /// `ρ ↦ E_f[U(u)ρU(u)†]`.
    fn average_channel(&self, rho: &CMatrix, f: &TdiDistribution, policy: NodePolicy) -> CMatrix {
        if let Some((values, phase)) = self.diagonal() {
            let mut out = rho.clone();
            for i in 0..rho.nrows() {
                for j in 0..rho.ncols() {
                    let a = (values[i] - values[j]) * phase;
                    if a != 0.0 {
                        out[(i, j)] *= C64::from_polar(1.0, -a) * f.characteristic(a);
                    }
                }
            }
            return out;
        }
        let mut next = CMatrix::zeros(rho.nrows(), rho.ncols());
        for (u, w) in f.rule(policy.nodes(self.phase_spread(), f.support_bound())) {
            let uu = self.unitary(u);
            next += (&uu * rho * uu.adjoint()) * C64::new(w, 0.0);
        }
        next
    }

    fn apply(&self, u: f64, v: &CVector) -> CVector {
        self.steps.iter().fold(v.clone(), |acc, s| {
            s.spectrum.apply_exp(s.phase * (1.0 + u), &acc)
        })
    }
}

/// A weighted component of a strategy. Environments that act as a static
/// mixture are represented by several branches.
#[derive(Clone, Debug)]
pub struct Branch {
    pub weight: f64,
    pub segments: Vec<Segment>,
}

/// Map from the mean outcome to a frequency estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Estimator {
    /// `factor·arccos(x̄)/time`.
    Arccos { time: f64, factor: f64 },
    /// Fitted CNOT law with known branch `k`.
    CnotFitted { time: f64, k: i64 },
}

impl Estimator {
    fn normalized(&self, x: f64) -> f64 {
        match self {
            Self::Arccos { .. } => x,
            Self::CnotFitted { .. } => x / cnot_fit::AMPLITUDE,
        }
    }

    /// Strict evaluation: fails outside the estimator's domain.
    pub fn estimate_strict(&self, x: f64) -> Result<f64> {
        let y = self.normalized(x);
        if !(y.abs() <= 1.0) {
            return Err(Error::EstimatorDomain(y));
        }
        Ok(self.eval(y))
    }

    /// Clamped evaluation, returning whether clamping was needed.
    pub fn estimate(&self, x: f64) -> (f64, bool) {
        let y = self.normalized(x);
        let clamped = y.abs() > 1.0;
        (self.eval(y.clamp(-1.0, 1.0)), clamped)
    }

    fn eval(&self, y: f64) -> f64 {
        match *self {
            Self::Arccos { time, factor } => factor * y.acos() / time,
            Self::CnotFitted { time, k } => {
                cnot_fit::SCALE * (2.0 * PI - y.acos() + 2.0 * PI * k as f64 - cnot_fit::OFFSET)
                    / time
            }
        }
    }

    /// `dω̂/dx̄`, infinite at the domain edge.
    pub fn derivative(&self, x: f64) -> f64 {
        let y = self.normalized(x);
        let dacos = -1.0 / (1.0 - y * y).sqrt();
        match *self {
            Self::Arccos { time, factor } => factor * dacos / time,
            Self::CnotFitted { time, .. } => {
                -cnot_fit::SCALE * dacos / (time * cnot_fit::AMPLITUDE)
            }
        }
    }
}

/// Branch index of the fitted CNOT estimator, `⌊(ωT + offset)/(2π)⌋`.
pub fn cnot_branch(omega: f64, t: f64) -> i64 {
    ((omega * t + cnot_fit::OFFSET) / (2.0 * PI)).floor() as i64
}

/// Mean outcome the fitted CNOT law predicts at `omega`; the inverse of
/// [`Estimator::CnotFitted`] on its branch.
pub fn cnot_fitted_forward(omega: f64, t: f64, k: i64) -> f64 {
    let theta = 2.0 * PI * (k as f64 + 1.0) - cnot_fit::OFFSET - omega * t / cnot_fit::SCALE;
    cnot_fit::AMPLITUDE * theta.cos()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    FeSwap,
    CeSwap,
    FeCnot,
    CeCnot,
    FeMultilevel,
    CeMultilevel,
}

/// A complete protocol: initial state, timed operations, readout and estimator.
#[derive(Clone, Debug)]
pub struct Strategy {
    pub name: String,
    pub kind: StrategyKind,
    pub dims: Vec<usize>,
    pub initial: StateVector,
    pub branches: Vec<Branch>,
    /// Untimed basis change applied just before the computational-basis readout.
    pub basis_change: Option<CMatrix>,
    /// Factors read out in the computational basis.
    pub measured: Vec<usize>,
    /// Outcome value per readout index.
    pub outcome_values: Vec<f64>,
    pub estimator: Estimator,
    /// Interrogation time the estimator assumes.
    pub total_time: f64,
}

/// Result of one ν-shot experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub mean_outcome: f64,
    pub shot_count: u64,
    pub omega_hat: f64,
    pub exact_probabilities: Option<Vec<f64>>,
    pub clamped: bool,
}

/// Sampled shots or exact outcome law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    Sampled,
    Exact,
}

impl Strategy {
    pub fn timed_op_count(&self) -> usize {
        self.branches[0].segments.len()
    }

    pub fn segments(&self) -> &[Segment] {
        &self.branches[0].segments
    }

    /// Sum of nominal precession durations.
    pub fn precession_time(&self) -> f64 {
        self.segments()
            .iter()
            .filter(|s| s.kind == SegmentKind::Precession)
            .map(|s| s.nominal)
            .sum()
    }

    /// Hermitian observable `Σ x_k·P_k` in the frame after the basis change.
    pub fn observable(&self) -> Operator {
        let kept: Vec<usize> = self.measured.iter().map(|&f| self.dims[f]).collect();
        let n: usize = self.dims.iter().product();
        let mut m = CMatrix::zeros(n, n);
        for idx in 0..n {
            let mut rest = idx;
            let mut digits = vec![0; self.dims.len()];
            for f in (0..self.dims.len()).rev() {
                digits[f] = rest % self.dims[f];
                rest /= self.dims[f];
            }
            let k = self
                .measured
                .iter()
                .zip(&kept)
                .fold(0, |acc, (&f, &d)| acc * d + digits[f]);
            m[(idx, idx)] = C64::new(self.outcome_values[k], 0.0);
        }
        Operator::hermitian(m, self.dims.clone()).expect("diagonal real")
    }

    fn check_draw(&self, draw: &DilationDraw) -> Result<()> {
        if draw.len() != self.timed_op_count() {
            return Err(Error::DrawLengthMismatch {
                expected: self.timed_op_count(),
                got: draw.len(),
            });
        }
        Ok(())
    }

    /// Joint pure state of one branch after the first `upto` segments.
    pub fn evolve_branch(
        &self,
        branch: usize,
        draw: &DilationDraw,
        upto: usize,
    ) -> Result<StateVector> {
        self.check_draw(draw)?;
        let segs = &self.branches[branch].segments;
        let mut v = self.initial.amplitudes().clone();
        for (seg, &u) in segs.iter().zip(&draw.values).take(upto) {
            v = seg.apply(u, &v);
        }
        Ok(StateVector::from_raw(v, self.dims.clone()))
    }

    /// Final state of a single-branch strategy just before readout.
    pub fn final_state(&self, draw: &DilationDraw) -> Result<StateVector> {
        self.evolve_branch(0, draw, self.timed_op_count())
    }

    fn readout_probs_pure(&self, v: &CVector) -> Result<Vec<f64>> {
        let v = match &self.basis_change {
            Some(b) => b * v,
            None => v.clone(),
        };
        StateVector::from_raw(v, self.dims.clone()).marginal_probabilities(&self.measured)
    }

    fn readout_probs_mixed(&self, rho: &CMatrix) -> Result<Vec<f64>> {
        let rho = match &self.basis_change {
            Some(b) => b * rho * b.adjoint(),
            None => rho.clone(),
        };
        DensityMatrix::from_raw(rho, self.dims.clone()).marginal_probabilities(&self.measured)
    }

    /// Outcome law for one fixed draw.
    pub fn probabilities(&self, draw: &DilationDraw) -> Result<Vec<f64>> {
        self.check_draw(draw)?;
        let mut out = vec![0.0; self.outcome_values.len()];
        for (b, branch) in self.branches.iter().enumerate() {
            let psi = self.evolve_branch(b, draw, self.timed_op_count())?;
            for (o, p) in out
                .iter_mut()
                .zip(self.readout_probs_pure(psi.amplitudes())?)
            {
                *o += branch.weight * p;
            }
        }
        Ok(out)
    }

    /// Outcome law averaged over `f`: each timed operation draws from `f`
    /// (independently or all sharing one draw).
    pub fn averaged_probabilities(
        &self,
        f: &TdiDistribution,
        sharing: Sharing,
        policy: NodePolicy,
    ) -> Result<Vec<f64>> {
        let n = self.timed_op_count();
        if f.is_degenerate() {
            let u = f.rule(1)[0].0;
            return self.probabilities(&DilationDraw::uniform_value(n, u));
        }
        match sharing {
            Sharing::Shared => {
                let spread: f64 = self.segments().iter().map(Segment::phase_spread).sum();
                let mut out = vec![0.0; self.outcome_values.len()];
                for (u, w) in f.rule(policy.nodes(spread, f.support_bound())) {
                    for (o, p) in out
                        .iter_mut()
                        .zip(self.probabilities(&DilationDraw::uniform_value(n, u))?)
                    {
                        *o += w * p;
                    }
                }
                Ok(out)
            }
            Sharing::Independent => {
                let mut out = vec![0.0; self.outcome_values.len()];
                let psi0 = self.initial.amplitudes();
                for branch in &self.branches {
                    let mut rho = psi0 * psi0.adjoint();
                    for seg in &branch.segments {
                        rho = seg.average_channel(&rho, f, policy);
                    }
                    for (o, p) in out.iter_mut().zip(self.readout_probs_mixed(&rho)?) {
                        *o += branch.weight * p;
                    }
                }
                Ok(out)
            }
        }
    }

    /// `Σ_k x_k·p_k`.
    pub fn mean_of(&self, probs: &[f64]) -> f64 {
        self.outcome_values
            .iter()
            .zip(probs)
            .map(|(x, p)| x * p)
            .sum()
    }

    /// `Σ_k x_k²·p_k − (Σ_k x_k·p_k)²`.
    pub fn single_shot_variance(&self, probs: &[f64]) -> f64 {
        let m = self.mean_of(probs);
        let m2: f64 = self
            .outcome_values
            .iter()
            .zip(probs)
            .map(|(x, p)| x * x * p)
            .sum();
        (m2 - m * m).max(0.0)
    }

    /// Draws `shots` outcomes from `probs` and returns the outcome mean.
    pub fn sample_mean<R: Rng + ?Sized>(
        &self,
        probs: &[f64],
        shots: u64,
        rng: &mut R,
    ) -> Result<f64> {
        let counts = multinomial(probs, shots, rng)?;
        Ok(self
            .outcome_values
            .iter()
            .zip(&counts)
            .map(|(x, &c)| x * c as f64)
            .sum::<f64>()
            / shots as f64)
    }

    /// Runs one experiment of `shots` shots, all under `draw`.
    pub fn run_once<R: Rng + ?Sized>(
        &self,
        draw: &DilationDraw,
        shots: u64,
        rng: &mut R,
        mode: RunMode,
    ) -> Result<RunOutcome> {
        if shots == 0 {
            return Err(Error::InvalidParams("shot count must be at least 1".into()));
        }
        let probs = self.probabilities(draw)?;
        self.outcome_from(probs, shots, rng, mode)
    }

    /// Runs one experiment with an outcome law already averaged over dilations.
    pub fn outcome_from<R: Rng + ?Sized>(
        &self,
        probs: Vec<f64>,
        shots: u64,
        rng: &mut R,
        mode: RunMode,
    ) -> Result<RunOutcome> {
        let x = match mode {
            RunMode::Exact => self.mean_of(&probs),
            RunMode::Sampled => self.sample_mean(&probs, shots, rng)?,
        };
        let (omega_hat, clamped) = self.estimator.estimate(x);
        Ok(RunOutcome {
            mean_outcome: x,
            shot_count: shots,
            omega_hat,
            exact_probabilities: (mode == RunMode::Exact).then_some(probs),
            clamped,
        })
    }
}

/// Multinomial counts via sequential binomials.
pub fn multinomial<R: Rng + ?Sized>(probs: &[f64], shots: u64, rng: &mut R) -> Result<Vec<u64>> {
    let probs = crate::qcore::validate_probabilities(probs)?;
    let mut counts = vec![0u64; probs.len()];
    let mut left = shots;
    let mut mass = 1.0;
    for (i, &p) in probs.iter().enumerate() {
        if left == 0 {
            break;
        }
        if i + 1 == probs.len() || mass <= 0.0 {
            counts[i] = left;
            break;
        }
        let q = (p / mass).clamp(0.0, 1.0);
        let c = Binomial::new(left, q).expect("q in [0,1]").sample(rng);
        counts[i] = c;
        left -= c;
        mass -= p;
    }
    Ok(counts)
}

const QUBITS3: [usize; 3] = [2, 2, 2];

fn bell_prep() -> Result<Segment> {
    Segment::pulse(
        "prep",
        &[
            gates::h().embed(0, &QUBITS3)?,
            gates::cnot().embed(0, &QUBITS3)?,
        ],
    )
}

fn bell_readout() -> Result<Segment> {
    Segment::pulse(
        "readout",
        &[
            gates::cnot().embed(0, &QUBITS3)?,
            gates::h().embed(0, &QUBITS3)?,
        ],
    )
}

fn single_branch(segments: Vec<Segment>) -> Vec<Branch> {
    vec![Branch {
        weight: 1.0,
        segments,
    }]
}

/// Bell-probe FE protocol with a SWAP-coupled environment qubit. The
/// estimator carries the Zeno factor 2.
pub fn build_fe_swap(p: &PhysicalParams) -> Result<Strategy> {
    p.validate()?;
    let residual = (p.g * p.t).sin().powi(2);
    if residual > DECOUPLING_TOL {
        return Err(Error::DecouplingViolation(residual));
    }
    let h = embed(&model::h_swap(p), 1, &QUBITS3)?;
    Ok(Strategy {
        name: "fe_swap".into(),
        kind: StrategyKind::FeSwap,
        dims: QUBITS3.to_vec(),
        initial: StateVector::basis(&QUBITS3, 0),
        branches: single_branch(vec![
            bell_prep()?,
            Segment::precession("free", &h, p.t)?,
            bell_readout()?,
        ]),
        basis_change: None,
        measured: vec![0],
        outcome_values: vec![1.0, -1.0],
        estimator: Estimator::Arccos {
            time: p.t,
            factor: 2.0,
        },
        total_time: p.t,
    })
}

/// Bell-probe FE protocol with a CNOT-coupled environment qubit.
pub fn build_fe_cnot(p: &PhysicalParams) -> Result<Strategy> {
    p.validate()?;
    let residual = (p.g * p.t / 2.0).sin().powi(2);
    if residual > DECOUPLING_TOL {
        return Err(Error::DecouplingViolation(residual));
    }
    let h = embed(&model::h_cnot(p), 1, &QUBITS3)?;
    Ok(Strategy {
        name: "fe_cnot".into(),
        kind: StrategyKind::FeCnot,
        dims: QUBITS3.to_vec(),
        initial: StateVector::basis(&QUBITS3, 0),
        branches: single_branch(vec![
            bell_prep()?,
            Segment::precession("free", &h, p.t)?,
            bell_readout()?,
        ]),
        basis_change: None,
        measured: vec![0],
        outcome_values: vec![1.0, -1.0],
        estimator: Estimator::Arccos {
            time: p.t,
            factor: 1.0,
        },
        total_time: p.t,
    })
}

/// Timed operations of the CE-SWAP circuit, in order.
pub const CE_SWAP_SEGMENTS: [&str; 7] = [
    "prep",
    "entangle",
    "ctrl0",
    "long",
    "ctrl1",
    "disentangle",
    "readout",
];

/// Control-enhanced protocol: the system–environment pair is steered into
/// span{|00⟩,|11⟩}, precesses for T′ and is mapped back for readout in the
/// basis {|0+⟩,|0−⟩,|1+⟩,|1−⟩} of ancilla ⊗ system.
pub fn build_ce_swap(p: &PhysicalParams, control: ControlModel) -> Result<Strategy> {
    p.validate()?;
    let d = &QUBITS3;
    let full = embed(&model::h_swap(p), 1, d)?;
    let short = match control {
        ControlModel::Physical => full.clone(),
        ControlModel::Ideal => embed(&model::h_swap_interaction(p.g), 1, d)?,
    };
    let segments = vec![
        Segment::pulse("prep", &[gates::x().embed(1, d)?, gates::h().embed(0, d)?])?,
        Segment::precession("entangle", &short, PI / (4.0 * p.g))?,
        Segment::pulse("ctrl0", &[gates::x().embed(1, d)?, gates::s().embed(1, d)?])?,
        Segment::precession("long", &full, p.t_prime())?,
        Segment::pulse("ctrl1", &[gates::yx_quarter().embed(0, d)?])?,
        Segment::precession("disentangle", &short, PI / (2.0 * p.g))?,
        Segment::pulse("readout", &[gates::h().embed(1, d)?])?,
    ];
    Ok(Strategy {
        name: "ce_swap".into(),
        kind: StrategyKind::CeSwap,
        dims: d.to_vec(),
        initial: StateVector::basis(d, 0),
        branches: single_branch(segments),
        basis_change: None,
        measured: vec![0, 1],
        outcome_values: vec![-1.0, 1.0, 1.0, -1.0],
        estimator: Estimator::Arccos {
            time: p.t_prime(),
            factor: 1.0,
        },
        total_time: p.t,
    })
}

/// Six angles of the two-qubit ansatz
/// `[R_Y(p0)⊗R_Y(p1)] · R_XX(p2) · R_ZZ(p3) · [R_X(p4)⊗R_X(p5)]`, layers applied left to right.
pub type AnsatzParams = [f64; 6];

fn ansatz_layers(
    params: &AnsatzParams,
    label: &str,
    first: usize,
    dims: &[usize],
) -> Result<Vec<Segment>> {
    let [a, b, c, d, e, f] = *params;
    Ok(vec![
        Segment::pulse(
            &format!("{label}.y"),
            &[
                gates::ry(a).embed(first, dims)?,
                gates::ry(b).embed(first + 1, dims)?,
            ],
        )?,
        Segment::pulse(&format!("{label}.xx"), &[gates::rxx(c).embed(first, dims)?])?,
        Segment::pulse(&format!("{label}.zz"), &[gates::rzz(d).embed(first, dims)?])?,
        Segment::pulse(
            &format!("{label}.x"),
            &[
                gates::rx(e).embed(first, dims)?,
                gates::rx(f).embed(first + 1, dims)?,
            ],
        )?,
    ])
}

/// Layer-wise phase bound `Σ_l max_i |φ_i|` of one ansatz block.
pub fn ansatz_phase(params: &AnsatzParams) -> f64 {
    let [a, b, c, d, e, f] = params.map(f64::abs);
    a.max(b) / 2.0 + c + d + e.max(f) / 2.0
}

/// CE protocol for the CNOT coupling: ansatz preparation on system ⊗
/// environment, precession T/2, intermediate control, precession T/2, ansatz
/// readout, then `Z_S X_E / 2` measured. `k` defaults to the branch implied by
/// the prior knowledge of `p.omega`.
pub fn build_ce_cnot(
    p: &PhysicalParams,
    ansatz: &AnsatzParams,
    control: &AnsatzParams,
    k: Option<i64>,
) -> Result<Strategy> {
    p.validate()?;
    let d = &QUBITS3;
    let h = embed(&model::h_cnot(p), 1, d)?;
    let mut segments = ansatz_layers(ansatz, "prep", 1, d)?;
    segments.push(Segment::precession("free0", &h, p.t / 2.0)?);
    segments.extend(ansatz_layers(control, "ctrl", 1, d)?);
    segments.push(Segment::precession("free1", &h, p.t / 2.0)?);
    segments.extend(ansatz_layers(ansatz, "readout", 1, d)?);
    let hadamard_env = embed(&gates::h().unitary(), 2, d)?;
    Ok(Strategy {
        name: "ce_cnot".into(),
        kind: StrategyKind::CeCnot,
        dims: d.to_vec(),
        initial: StateVector::basis(d, 0),
        branches: single_branch(segments),
        basis_change: Some(hadamard_env.into_matrix()),
        measured: vec![1, 2],
        outcome_values: vec![0.5, -0.5, -0.5, 0.5],
        estimator: Estimator::CnotFitted {
            time: p.t,
            k: k.unwrap_or_else(|| cnot_branch(p.omega, p.t)),
        },
        total_time: p.t,
    })
}

/// How the phonon environment is simulated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultilevelRepr {
    /// Static mixture over the modes' quadrature eigenvalues (exact for this coupling).
    #[default]
    Mixture,
    /// Dense joint register ancilla ⊗ system ⊗ modes.
    Dense,
}

fn multilevel_branches(
    omega: f64,
    env: &EnvironmentSpec,
    repr: MultilevelRepr,
    durations: &[(&str, f64)],
) -> Result<(Vec<usize>, StateVector, Vec<Branch>)> {
    let EnvironmentSpec::PhononModes {
        fock_dim,
        couplings,
    } = env
    else {
        return Err(Error::InvalidParams(
            "multi-level strategies need phonon modes".into(),
        ));
    };
    env.validate()?;
    let prep = |dims: &[usize]| -> Result<Segment> {
        Segment::pulse(
            "prep",
            &[gates::h().embed(0, dims)?, gates::cnot().embed(0, dims)?],
        )
    };
    let readout = |dims: &[usize]| -> Result<Segment> {
        Segment::pulse(
            "readout",
            &[gates::cnot().embed(0, dims)?, gates::h().embed(0, dims)?],
        )
    };
    let build = |dims: &[usize], h: &Operator| -> Result<Vec<Segment>> {
        let mut segs = vec![prep(dims)?];
        for &(label, t) in durations {
            segs.push(Segment::precession(label, h, t)?);
        }
        segs.push(readout(dims)?);
        Ok(segs)
    };
    match repr {
        MultilevelRepr::Mixture => {
            let dims = vec![2, 2];
            let n1 = embed(&pauli::n(), 1, &dims)?;
            let branches = model::phonon_offsets(couplings, *fock_dim)
                .into_iter()
                .filter(|&(w, _)| w > 1e-300)
                .map(|(w, delta)| {
                    Ok(Branch {
                        weight: w,
                        segments: build(&dims, &n1.scale(omega + delta))?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((dims.clone(), StateVector::basis(&dims, 0), branches))
        }
        MultilevelRepr::Dense => {
            let hse = model::electron_phonon(omega, couplings, *fock_dim)?;
            let mut dims = vec![2];
            dims.extend_from_slice(hse.dims());
            let h = pauli::id().kron(&hse);
            let segs = build(&dims, &h)?;
            Ok((
                dims.clone(),
                StateVector::basis(&dims, 0),
                single_branch(segs),
            ))
        }
    }
}

fn multilevel_strategy(
    name: &str,
    kind: StrategyKind,
    p: &PhysicalParams,
    env: &EnvironmentSpec,
    repr: MultilevelRepr,
    durations: &[(&str, f64)],
) -> Result<Strategy> {
    let (dims, initial, branches) = multilevel_branches(p.omega, env, repr, durations)?;
    Ok(Strategy {
        name: name.into(),
        kind,
        measured: vec![0],
        outcome_values: vec![1.0, -1.0],
        estimator: Estimator::Arccos {
            time: p.t,
            factor: 1.0,
        },
        total_time: p.t,
        dims,
        initial,
        branches,
        basis_change: None,
    })
}

/// Bell-probe FE protocol on a spin coupled to phonon modes.
pub fn build_fe_multilevel(
    p: &PhysicalParams,
    env: &EnvironmentSpec,
    repr: MultilevelRepr,
) -> Result<Strategy> {
    multilevel_strategy(
        "fe_multilevel",
        StrategyKind::FeMultilevel,
        p,
        env,
        repr,
        &[("free", p.t)],
    )
}

/// CE reconstruction for phonon environments: the Bell probe precesses in
/// three separately timed intervals `π/(4g₁)`, `T − 3π/(4g₁)`, `π/(2g₁)`
/// keyed to the strongest mode `g₁ = p.g`. The excitation number commutes
/// with every coupling term, so no pulse on ancilla or system separates `ω`
/// from the mode offsets; the intermediate controls reduce to the identity.
pub fn build_ce_multilevel(
    p: &PhysicalParams,
    env: &EnvironmentSpec,
    repr: MultilevelRepr,
) -> Result<Strategy> {
    let g1 = p.g;
    let durations = [
        ("entangle", PI / (4.0 * g1)),
        ("long", p.t - 3.0 * PI / (4.0 * g1)),
        ("disentangle", PI / (2.0 * g1)),
    ];
    multilevel_strategy(
        "ce_multilevel",
        StrategyKind::CeMultilevel,
        p,
        env,
        repr,
        &durations,
    )
}

/// Serializable strategy selector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrategySpec {
    FeSwap,
    CeSwap {
        #[serde(default)]
        control: ControlModel,
    },
    FeCnot,
    CeCnot {
        #[serde(default)]
        ansatz: Option<AnsatzParams>,
        #[serde(default)]
        control: Option<AnsatzParams>,
        #[serde(default)]
        branch: Option<i64>,
    },
    FeMultilevel {
        env: EnvironmentSpec,
        #[serde(default)]
        repr: MultilevelRepr,
    },
    CeMultilevel {
        env: EnvironmentSpec,
        #[serde(default)]
        repr: MultilevelRepr,
    },
}

impl StrategySpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::FeSwap => "fe_swap",
            Self::CeSwap { .. } => "ce_swap",
            Self::FeCnot => "fe_cnot",
            Self::CeCnot { .. } => "ce_cnot",
            Self::FeMultilevel { .. } => "fe_multilevel",
            Self::CeMultilevel { .. } => "ce_multilevel",
        }
    }

    pub fn build(&self, p: &PhysicalParams) -> Result<Strategy> {
        match self {
            Self::FeSwap => build_fe_swap(p),
            Self::CeSwap { control } => build_ce_swap(p, *control),
            Self::FeCnot => build_fe_cnot(p),
            Self::CeCnot {
                ansatz,
                control,
                branch,
            } => {
                let ansatz = ansatz
                    .ok_or_else(|| Error::Config("ce_cnot needs ansatz parameters".into()))?;
                build_ce_cnot(p, &ansatz, &control.unwrap_or([0.0; 6]), *branch)
            }
            Self::FeMultilevel { env, repr } => build_fe_multilevel(p, env, *repr),
            Self::CeMultilevel { env, repr } => build_ce_multilevel(p, env, *repr),
        }
    }
}

/// Phase budgets of the CE-SWAP pulses: prep, first control, second control, readout.
pub const CE_SWAP_PHASES: [f64; 4] = [FRAC_PI_2, FRAC_PI_2 + FRAC_PI_4, FRAC_PI_4, FRAC_PI_2];
