//! Hamiltonians, the gate set and the physical parameter block.
//!
//! Qubit registers are ordered (ancilla, system, environment). Two-body
//! Hamiltonians act on (system, environment).

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{kron_all, matexp_hermitian, pauli, CMatrix, Kron, Operator, C64, ONE, ZERO};

/// Default cap on the dense electron–phonon register.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// Frequency, coupling and interrogation time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub omega: f64,
    pub g: f64,
    pub t: f64,
}

impl PhysicalParams {
    pub fn new(omega: f64, g: f64, t: f64) -> Result<Self> {
        let p = Self { omega, g, t };
        p.validate()?;
        Ok(p)
    }

    /// ω = 1/300, g = 10, T = 80π.
    pub fn reference() -> Self {
        Self {
            omega: 1.0 / 300.0,
            g: 10.0,
            t: 80.0 * PI,
        }
    }

    pub fn with_omega(self, omega: f64) -> Self {
        Self { omega, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.g.is_finite() && self.t.is_finite()) {
            return Err(Error::InvalidParams(format!("{self:?}")));
        }
        if self.g <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "g = {} must be positive",
                self.g
            )));
        }
        if self.t <= 3.0 * PI / (4.0 * self.g) {
            return Err(Error::InvalidParams(format!(
                "T = {} must exceed 3π/(4g) = {}",
                self.t,
                3.0 * PI / (4.0 * self.g)
            )));
        }
        Ok(())
    }

    /// Ω = √(g² + ω²/4).
    pub fn big_omega(&self) -> f64 {
        (self.g * self.g + self.omega * self.omega / 4.0).sqrt()
    }

    /// Ω′ = √(4g² + ω²).
    pub fn big_omega_prime(&self) -> f64 {
        (4.0 * self.g * self.g + self.omega * self.omega).sqrt()
    }

    /// T′ = T − 3π/(4g), the long precession of the control-enhanced circuit.
    pub fn t_prime(&self) -> f64 {
        self.t - 3.0 * PI / (4.0 * self.g)
    }

    /// ε* = π/(2ΩT).
    pub fn eps_star(&self) -> f64 {
        PI / (2.0 * self.big_omega() * self.t)
    }

    pub fn is_strong_coupling(&self) -> bool {
        self.g >= 100.0 * self.omega.abs()
    }
}

/// A gate `exp(-i·A·φ)` with unit-norm Hermitian generator `A`. Dilation
/// scales the phase: `exp(-i·A·φ(1+u))`.
#[derive(Clone, Debug)]
pub struct Gate {
    pub name: String,
    pub generator: Operator,
    pub phase: f64,
}

impl Gate {
    pub fn new(name: impl Into<String>, generator: Operator, phase: f64) -> Result<Self> {
        if !generator.is_hermitian() {
            return Err(Error::NonHermitianInput(0.0));
        }
        Ok(Self {
            name: name.into(),
            generator,
            phase,
        })
    }

    pub fn arity(&self) -> usize {
        self.generator.dims().len()
    }

    pub fn unitary(&self) -> Operator {
        self.dilated(0.0)
    }

    pub fn dilated(&self, u: f64) -> Operator {
        matexp_hermitian(&self.generator, self.phase * (1.0 + u))
            .expect("gate generators are Hermitian")
    }

    /// Same gate acting on the factors starting at `first` of `dims`.
    pub fn embed(&self, first: usize, dims: &[usize]) -> Result<Gate> {
        Ok(Gate {
            name: format!("{}@{first}", self.name),
            generator: embed(&self.generator, first, dims)?,
            phase: self.phase,
        })
    }
}

/// Places `op` on the contiguous factors starting at `first`, identity elsewhere.
pub fn embed(op: &Operator, first: usize, dims: &[usize]) -> Result<Operator> {
    let span = op.dims().len();
    if first + span > dims.len() {
        return Err(Error::BadSubsystemIndex {
            index: first + span - 1,
            count: dims.len(),
        });
    }
    if dims[first..first + span] != *op.dims() {
        return Err(Error::DimMismatch {
            expected: dims[first..first + span].iter().product(),
            got: op.dim(),
        });
    }
    let left = Operator::identity(&dims[..first]);
    let right = Operator::identity(&dims[first + span..]);
    let mut out = op.clone();
    if first > 0 {
        out = left.kron(&out);
    }
    if first + span < dims.len() {
        out = out.kron(&right);
    }
    out.with_dims(dims.to_vec())
}

fn two_qubit(entries: [[C64; 4]; 4]) -> Operator {
    let flat: Vec<C64> = entries.iter().flatten().copied().collect();
    Operator::new(CMatrix::from_row_slice(4, 4, &flat), vec![2, 2]).expect("4x4 constant")
}

/// SWAP on two qubits.
pub fn swap_matrix() -> Operator {
    two_qubit([
        [ONE, ZERO, ZERO, ZERO],
        [ZERO, ZERO, ONE, ZERO],
        [ZERO, ONE, ZERO, ZERO],
        [ZERO, ZERO, ZERO, ONE],
    ])
}

/// CNOT with the first factor as control.
pub fn cnot_matrix() -> Operator {
    two_qubit([
        [ONE, ZERO, ZERO, ZERO],
        [ZERO, ONE, ZERO, ZERO],
        [ZERO, ZERO, ZERO, ONE],
        [ZERO, ZERO, ONE, ZERO],
    ])
}

/// Named gates carrying generator and nominal phase.
pub mod gates {
    use super::*;

    fn projector_generator(op: Operator) -> Operator {
        // (I - op)/2 for an involution: eigenvalues {0, 1}, exp(-iπ·P) = op
        let n = op.dim();
        let m = (CMatrix::identity(n, n) - op.matrix()) * C64::new(0.5, 0.0);
        Operator::hermitian(m, op.dims().to_vec()).expect("involution generator")
    }

    pub fn x() -> Gate {
        Gate::new("X", pauli::x(), FRAC_PI_2).unwrap()
    }

    pub fn y() -> Gate {
        Gate::new("Y", pauli::y(), FRAC_PI_2).unwrap()
    }

    pub fn z() -> Gate {
        Gate::new("Z", pauli::z(), FRAC_PI_2).unwrap()
    }

    /// `exp(-iZπ/4)`, the phase gate up to a global phase.
    pub fn s() -> Gate {
        Gate::new("S", pauli::z(), FRAC_PI_4).unwrap()
    }

    /// `exp(-i(X+Z)π/(2√2)) = -i·H`.
    pub fn h() -> Gate {
        Gate::new(
            "H",
            pauli::x().add(&pauli::z()).unwrap().scale(FRAC_1_SQRT_2),
            FRAC_PI_2,
        )
        .unwrap()
    }

    pub fn cnot() -> Gate {
        Gate::new("CNOT", projector_generator(cnot_matrix()), PI).unwrap()
    }

    pub fn swap() -> Gate {
        Gate::new("SWAP", projector_generator(swap_matrix()), PI).unwrap()
    }

    /// `R_X(θ) = exp(-iθX/2)`.
    pub fn rx(theta: f64) -> Gate {
        Gate::new("RX", pauli::x(), theta / 2.0).unwrap()
    }

    /// `R_Y(θ) = exp(-iθY/2)`.
    pub fn ry(theta: f64) -> Gate {
        Gate::new("RY", pauli::y(), theta / 2.0).unwrap()
    }

    /// `R_XX(θ) = exp(-iθ X⊗X)`.
    pub fn rxx(theta: f64) -> Gate {
        Gate::new("RXX", pauli::x().kron(&pauli::x()), theta).unwrap()
    }

    /// `R_ZZ(θ) = exp(-iθ Z⊗Z)`.
    pub fn rzz(theta: f64) -> Gate {
        Gate::new("RZZ", pauli::z().kron(&pauli::z()), theta).unwrap()
    }

    /// `exp(-i Y⊗X π/4)`.
    pub fn yx_quarter() -> Gate {
        Gate::new("YX", pauli::y().kron(&pauli::x()), FRAC_PI_4).unwrap()
    }

    /// All fixed gates by name.
    pub fn library() -> Vec<Gate> {
        vec![h(), s(), x(), y(), z(), cnot(), swap(), yx_quarter()]
    }
}

/// `(ω/2)·Z ⊗ I + g·SWAP` on system ⊗ environment.
pub fn h_swap(p: &PhysicalParams) -> Operator {
    let zi = pauli::z().kron(&pauli::id()).scale(p.omega / 2.0);
    zi.add(&swap_matrix().scale(p.g)).expect("4x4")
}

/// `g·SWAP` alone.
pub fn h_swap_interaction(g: f64) -> Operator {
    swap_matrix().scale(g)
}

/// `(ω/2)·Z ⊗ I + g·CNOT` with the system as control.
pub fn h_cnot(p: &PhysicalParams) -> Operator {
    let zi = pauli::z().kron(&pauli::id()).scale(p.omega / 2.0);
    zi.add(&cnot_matrix().scale(p.g)).expect("4x4")
}

/// Environment attached to the system qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvironmentSpec {
    /// A qubit starting in `|0⟩`.
    Qubit,
    /// Bosonic modes in vacuum, each truncated to `fock_dim` levels.
    PhononModes {
        fock_dim: usize,
        couplings: Vec<f64>,
    },
}

impl EnvironmentSpec {
    pub fn phonons(fock_dim: usize, couplings: Vec<f64>) -> Result<Self> {
        let e = Self::PhononModes {
            fock_dim,
            couplings,
        };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        if let Self::PhononModes {
            fock_dim,
            couplings,
        } = self
        {
            if *fock_dim < 2 {
                return Err(Error::InvalidParams(format!("fock_dim = {fock_dim} < 2")));
            }
            if couplings.is_empty() || couplings.iter().any(|&g| !(g.is_finite() && g >= 0.0)) {
                return Err(Error::InvalidParams(format!("couplings {couplings:?}")));
            }
            if couplings.windows(2).any(|w| w[1] > w[0]) {
                return Err(Error::InvalidParams(format!(
                    "couplings {couplings:?} not in decreasing order"
                )));
            }
        }
        Ok(())
    }

    /// Largest coupling (1 for a qubit, which has no coupling scale of its own).
    pub fn max_coupling(&self) -> Option<f64> {
        match self {
            Self::Qubit => None,
            Self::PhononModes { couplings, .. } => couplings.first().copied(),
        }
    }

    pub fn with_fock_dim(&self, d: usize) -> Self {
        match self {
            Self::Qubit => Self::Qubit,
            Self::PhononModes { couplings, .. } => Self::PhononModes {
                fock_dim: d,
                couplings: couplings.clone(),
            },
        }
    }
}

/// Truncated annihilation operator on `d` Fock levels.
pub fn annihilation(d: usize) -> Operator {
    let mut m = CMatrix::zeros(d, d);
    for k in 1..d {
        m[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    Operator::new(m, vec![d]).expect("square")
}

/// Truncated quadrature `b + b†`.
pub fn position_quadrature(d: usize) -> Operator {
    let b = annihilation(d);
    b.add(&b.adjoint()).expect("same dim")
}

/// `ω·n̂ ⊗ I + Σ_ν g_ν·n̂ ⊗ (b_ν + b_ν†)` on system ⊗ modes, `n̂ = |1⟩⟨1|`.
pub fn electron_phonon(omega: f64, couplings: &[f64], fock_dim: usize) -> Result<Operator> {
    electron_phonon_capped(omega, couplings, fock_dim, DEFAULT_DIM_CAP)
}

pub fn electron_phonon_capped(
    omega: f64,
    couplings: &[f64],
    fock_dim: usize,
    cap: usize,
) -> Result<Operator> {
    EnvironmentSpec::PhononModes {
        fock_dim,
        couplings: couplings.to_vec(),
    }
    .validate()?;
    let n_modes = couplings.len();
    let dim = fock_dim
        .checked_pow(n_modes as u32)
        .and_then(|v| v.checked_mul(2))
        .ok_or(Error::DimensionOverflow {
            dim: usize::MAX,
            cap,
        })?;
    if dim > cap {
        return Err(Error::DimensionOverflow { dim, cap });
    }
    let mut dims = vec![2];
    dims.extend(std::iter::repeat_n(fock_dim, n_modes));
    let id_d = Operator::identity(&[fock_dim]);
    let n = pauli::n();
    let mut h = embed(&n, 0, &dims)?.scale(omega);
    let x = position_quadrature(fock_dim);
    for (nu, &g) in couplings.iter().enumerate() {
        let mut factors: Vec<&Operator> = vec![&n];
        for mu in 0..n_modes {
            factors.push(if mu == nu { &x } else { &id_d });
        }
        h = h.add(&kron_all(&factors).scale(g))?;
    }
    Operator::hermitian(h.into_matrix(), dims)
}

/// Spectrum of the truncated quadrature weighted by the vacuum:
/// `(|⟨x_j|0⟩|², x_j)` per eigenvector.
pub fn vacuum_quadrature_law(fock_dim: usize) -> Vec<(f64, f64)> {
    let mut m = DMatrix::<f64>::zeros(fock_dim, fock_dim);
    for k in 1..fock_dim {
        let s = (k as f64).sqrt();
        m[(k - 1, k)] = s;
        m[(k, k - 1)] = s;
    }
    let eig = SymmetricEigen::new(m);
    (0..fock_dim)
        .map(|j| (eig.eigenvectors[(0, j)].powi(2), eig.eigenvalues[j]))
        .collect()
}

/// Static frequency offsets seen by the excited system level: the modes'
/// quadratures commute with the coupling, so the vacuum environment acts as
/// a mixture over `δ = Σ_ν g_ν·x_ν` with vacuum weights. Returns `(weight, δ)`.
pub fn phonon_offsets(couplings: &[f64], fock_dim: usize) -> Vec<(f64, f64)> {
    let law = vacuum_quadrature_law(fock_dim);
    let mut out = vec![(1.0, 0.0)];
    for &g in couplings {
        out = out
            .iter()
            .flat_map(|&(w, d)| law.iter().map(move |&(wx, x)| (w * wx, d + g * x)))
            .collect();
    }
    out
}
