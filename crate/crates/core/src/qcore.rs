//! Dense complex linear algebra for registers of a few hundred dimensions.
//!
//! Registers are tensor products of small factors. Factor 0 is the ancilla,
//! factor 1 the system and factor 2 (and beyond) the environment.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

use crate::error::{Error, Result};

pub use num_complex::Complex64 as C64;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Elementwise tolerance for the Hermitian tag, scaled by the largest entry.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Operator-norm tolerance for the unitary tag.
pub const UNITARY_TOL: f64 = 1e-10;
/// Tolerance on state norms and density-matrix traces.
pub const NORM_TOL: f64 = 1e-10;

const UNITARY_CHECK_MAX_DIM: usize = 256;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

fn product(dims: &[usize]) -> usize {
    dims.iter().product()
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

fn unitary_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let diff = m * m.adjoint() - CMatrix::identity(n, n);
    largest_singular_value(&diff)
}

fn largest_singular_value(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// A square complex matrix acting on a tensor-product register.
#[derive(Clone, Debug)]
pub struct Operator {
    matrix: CMatrix,
    dims: Vec<usize>,
    hermitian: bool,
    unitary: bool,
}

impl Operator {
    /// Wraps `matrix`, tagging it Hermitian and (for small registers) unitary
    /// when it passes the respective checks.
    pub fn new(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(Error::DimMismatch {
                expected: n,
                got: matrix.ncols(),
            });
        }
        if product(&dims) != n {
            return Err(Error::DimMismatch {
                expected: n,
                got: product(&dims),
            });
        }
        let scale = max_abs(&matrix).max(1.0);
        let hermitian = hermitian_deviation(&matrix) <= HERMITIAN_TOL * scale;
        let unitary = n <= UNITARY_CHECK_MAX_DIM && unitary_deviation(&matrix) <= UNITARY_TOL;
        Ok(Self {
            matrix,
            dims,
            hermitian,
            unitary,
        })
    }

    /// Like [`Operator::new`] but fails unless the matrix is Hermitian.
    pub fn hermitian(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        let scale = max_abs(&matrix).max(1.0);
        let dev = hermitian_deviation(&matrix);
        let op = Self::new(matrix, dims)?;
        if !op.hermitian {
            return Err(Error::NonHermitianInput(dev / scale));
        }
        Ok(op)
    }

    /// Single-factor operator from row-major entries.
    pub fn from_rows(n: usize, entries: &[C64]) -> Result<Self> {
        Self::new(CMatrix::from_row_slice(n, n, entries), vec![n])
    }

    pub fn identity(dims: &[usize]) -> Self {
        let n = product(dims);
        Self {
            matrix: CMatrix::identity(n, n),
            dims: dims.to_vec(),
            hermitian: true,
            unitary: true,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    /// Regroups the register into different factors of the same total dimension.
    pub fn with_dims(mut self, dims: Vec<usize>) -> Result<Self> {
        if product(&dims) != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                got: product(&dims),
            });
        }
        self.dims = dims;
        Ok(self)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: &self.matrix * C64::new(s, 0.0),
            dims: self.dims.clone(),
            hermitian: self.hermitian,
            unitary: self.unitary && (s.abs() - 1.0).abs() < 1e-15,
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Self::new(&self.matrix + &other.matrix, self.dims.clone())
    }

    pub fn mul(&self, other: &Operator) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Self::new(&self.matrix * &other.matrix, self.dims.clone())
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            dims: self.dims.clone(),
            hermitian: self.hermitian,
            unitary: self.unitary,
        }
    }

    pub fn commutator(&self, other: &Operator) -> Result<CMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(&self.matrix * &other.matrix - &other.matrix * &self.matrix)
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if self.dim() != state.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                got: state.dim(),
            });
        }
        Ok(StateVector {
            amplitudes: &self.matrix * &state.amplitudes,
            dims: state.dims.clone(),
        })
    }

    /// Largest elementwise deviation from `other`.
    pub fn max_deviation(&self, other: &Operator) -> f64 {
        (&self.matrix - &other.matrix)
            .iter()
            .fold(0.0, |acc, z| acc.max(z.norm()))
    }
}

/// Tensor product with concatenated subsystem dimensions.
pub trait Kron {
    fn kron(&self, other: &Self) -> Self;
}

impl Kron for Operator {
    fn kron(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            matrix: self.matrix.kronecker(&other.matrix),
            dims,
            hermitian: self.hermitian && other.hermitian,
            unitary: self.unitary && other.unitary,
        }
    }
}

impl Kron for StateVector {
    fn kron(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
            dims,
        }
    }
}

/// Kronecker product of a list of operators, left to right.
pub fn kron_all(ops: &[&Operator]) -> Operator {
    let mut iter = ops.iter();
    let first = (*iter.next().expect("kron_all needs at least one operator")).clone();
    iter.fold(first, |acc, op| acc.kron(op))
}

/// Eigendecomposition of a Hermitian operator, reused to exponentiate it at
/// many phases.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
    dims: Vec<usize>,
    diagonal: bool,
}

impl Spectrum {
    pub fn of(h: &Operator) -> Result<Self> {
        if !h.is_hermitian() {
            return Err(Error::NonHermitianInput(hermitian_deviation(h.matrix())));
        }
        let m = h.matrix();
        let n = m.nrows();
        let is_diag = (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == ZERO));
        if is_diag {
            return Ok(Self::diagonal(
                (0..n).map(|i| m[(i, i)].re).collect(),
                h.dims.clone(),
            ));
        }
        // Symmetrize away roundoff so the solver sees an exactly Hermitian input.
        let m = (m + m.adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(m);
        Ok(Self {
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
            dims: h.dims.clone(),
            diagonal: false,
        })
    }

    /// Diagonal generator with the given eigenvalues in the computational basis.
    pub fn diagonal(values: Vec<f64>, dims: Vec<usize>) -> Self {
        let n = values.len();
        Self {
            values,
            vectors: CMatrix::identity(n, n),
            dims,
            diagonal: true,
        }
    }

    /// Whether the eigenbasis is the computational basis.
    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Largest minus smallest eigenvalue.
    pub fn spread(&self) -> f64 {
        let (lo, hi) = self
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        if self.values.is_empty() {
            0.0
        } else {
            hi - lo
        }
    }

    /// `exp(-i·phase·H)` as a dense matrix.
    pub fn exp_matrix(&self, phase: f64) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let f = C64::from_polar(1.0, -lambda * phase);
            for i in 0..n {
                scaled[(i, j)] *= f;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// `exp(-i·phase·H)·v` without forming the full matrix.
    pub fn apply_exp(&self, phase: f64, v: &CVector) -> CVector {
        let mut coeffs = self.vectors.adjoint() * v;
        for (c, &lambda) in coeffs.iter_mut().zip(&self.values) {
            *c *= C64::from_polar(1.0, -lambda * phase);
        }
        &self.vectors * coeffs
    }

    pub fn exp(&self, phase: f64) -> Operator {
        let matrix = self.exp_matrix(phase);
        let n = matrix.nrows();
        let unitary = n > UNITARY_CHECK_MAX_DIM || unitary_deviation(&matrix) <= UNITARY_TOL;
        Operator {
            matrix,
            dims: self.dims.clone(),
            hermitian: false,
            unitary,
        }
    }
}

/// `exp(-i·phase·h)` via the eigendecomposition of `h`.
pub fn matexp_hermitian(h: &Operator, phase: f64) -> Result<Operator> {
    if !phase.is_finite() {
        return Err(Error::InvalidParams(format!("non-finite phase {phase}")));
    }
    Ok(Spectrum::of(h)?.exp(phase))
}

/// Largest singular value.
pub fn operator_norm(a: &Operator) -> f64 {
    largest_singular_value(a.matrix())
}

/// Largest singular value of a raw matrix.
pub fn matrix_norm(m: &CMatrix) -> f64 {
    largest_singular_value(m)
}

/// Normalized pure state on a tensor-product register.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
    dims: Vec<usize>,
}

impl StateVector {
    pub fn new(amplitudes: CVector, dims: Vec<usize>) -> Result<Self> {
        if product(&dims) != amplitudes.len() {
            return Err(Error::DimMismatch {
                expected: amplitudes.len(),
                got: product(&dims),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized(norm));
        }
        Ok(Self { amplitudes, dims })
    }

    /// Normalizes `amplitudes` before wrapping them.
    pub fn normalized(amplitudes: CVector, dims: Vec<usize>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Unnormalized(norm));
        }
        Self::new(amplitudes / C64::new(norm, 0.0), dims)
    }

    pub fn from_slice(amplitudes: &[C64], dims: Vec<usize>) -> Result<Self> {
        Self::normalized(CVector::from_column_slice(amplitudes), dims)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dims: &[usize], index: usize) -> Self {
        let n = product(dims);
        assert!(
            index < n,
            "basis index {index} out of range for dimension {n}"
        );
        let mut amplitudes = CVector::zeros(n);
        amplitudes[index] = ONE;
        Self {
            amplitudes,
            dims: dims.to_vec(),
        }
    }

    /// Product basis state from per-factor levels, e.g. `&[0, 1, 0]` is `|010⟩`.
    pub fn product_basis(dims: &[usize], levels: &[usize]) -> Self {
        assert_eq!(dims.len(), levels.len());
        let index = levels.iter().zip(dims).fold(0, |acc, (&l, &d)| {
            assert!(l < d);
            acc * d + l
        });
        Self::basis(dims, index)
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `|⟨self|other⟩|`, the global-phase-insensitive overlap.
    pub fn fidelity_amplitude(&self, other: &StateVector) -> f64 {
        self.inner(other).norm()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
            dims: self.dims.clone(),
        }
    }

    /// Outcome distribution of a computational-basis measurement of the
    /// factors in `keep`, in row-major order over those factors.
    pub fn marginal_probabilities(&self, keep: &[usize]) -> Result<Vec<f64>> {
        let layout = Layout::new(&self.dims, keep)?;
        let mut probs = vec![0.0; layout.kept_dim];
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            probs[layout.kept_index(idx)] += amp.norm_sqr();
        }
        Ok(probs)
    }

    pub(crate) fn from_raw(amplitudes: CVector, dims: Vec<usize>) -> Self {
        Self { amplitudes, dims }
    }
}

/// Mixed state on a tensor-product register.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: CMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Checks unit trace, Hermiticity and positivity before wrapping.
    pub fn new(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n || product(&dims) != n {
            return Err(Error::DimMismatch {
                expected: n,
                got: product(&dims),
            });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::Unnormalized(tr.norm()));
        }
        let dev = hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOL {
            return Err(Error::NonHermitianInput(dev));
        }
        let herm = (&matrix + matrix.adjoint()) * C64::new(0.5, 0.0);
        let min_eig = SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -NORM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "density matrix has eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { matrix, dims })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Outcome distribution of a computational-basis measurement of `keep`.
    pub fn marginal_probabilities(&self, keep: &[usize]) -> Result<Vec<f64>> {
        let layout = Layout::new(&self.dims, keep)?;
        let mut probs = vec![0.0; layout.kept_dim];
        for idx in 0..self.dim() {
            probs[layout.kept_index(idx)] += self.matrix[(idx, idx)].re;
        }
        Ok(probs)
    }

    pub(crate) fn from_raw(matrix: CMatrix, dims: Vec<usize>) -> Self {
        Self { matrix, dims }
    }
}

/// Index bookkeeping for splitting a register into kept and traced factors.
struct Layout {
    dims: Vec<usize>,
    keep_mask: Vec<bool>,
    kept_dim: usize,
    traced_dim: usize,
}

impl Layout {
    fn new(dims: &[usize], keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::BadSubsystemIndex {
                index: usize::MAX,
                count: dims.len(),
            });
        }
        let mut keep_mask = vec![false; dims.len()];
        for &k in keep {
            if k >= dims.len() || keep_mask[k] {
                return Err(Error::BadSubsystemIndex {
                    index: k,
                    count: dims.len(),
                });
            }
            keep_mask[k] = true;
        }
        let kept_dim = dims
            .iter()
            .zip(&keep_mask)
            .filter(|(_, &m)| m)
            .map(|(d, _)| d)
            .product();
        let traced_dim = dims
            .iter()
            .zip(&keep_mask)
            .filter(|(_, &m)| !m)
            .map(|(d, _)| d)
            .product();
        Ok(Self {
            dims: dims.to_vec(),
            keep_mask,
            kept_dim,
            traced_dim,
        })
    }

    /// Splits a full row-major index into (kept, traced) indices.
    fn split(&self, mut idx: usize) -> (usize, usize) {
        let (mut kept, mut kept_stride) = (0, 1);
        let (mut traced, mut traced_stride) = (0, 1);
        for (f, &d) in self.dims.iter().enumerate().rev() {
            let digit = idx % d;
            idx /= d;
            if self.keep_mask[f] {
                kept += digit * kept_stride;
                kept_stride *= d;
            } else {
                traced += digit * traced_stride;
                traced_stride *= d;
            }
        }
        (kept, traced)
    }

    fn kept_index(&self, idx: usize) -> usize {
        self.split(idx).0
    }

    fn kept_dims(&self) -> Vec<usize> {
        self.dims
            .iter()
            .zip(&self.keep_mask)
            .filter(|(_, &m)| m)
            .map(|(&d, _)| d)
            .collect()
    }
}

/// Reduced state on the factors in `keep` (listed in register order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let layout = Layout::new(&rho.dims, keep)?;
    let n = rho.dim();
    let split: Vec<(usize, usize)> = (0..n).map(|i| layout.split(i)).collect();
    // full index for each (kept, traced) pair
    let mut full = vec![0usize; layout.kept_dim * layout.traced_dim];
    for (i, &(k, t)) in split.iter().enumerate() {
        full[k * layout.traced_dim + t] = i;
    }
    let mut out = CMatrix::zeros(layout.kept_dim, layout.kept_dim);
    for a in 0..layout.kept_dim {
        for b in 0..layout.kept_dim {
            let mut acc = ZERO;
            for t in 0..layout.traced_dim {
                acc += rho.matrix[(
                    full[a * layout.traced_dim + t],
                    full[b * layout.traced_dim + t],
                )];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(DensityMatrix {
        matrix: out,
        dims: layout.kept_dims(),
    })
}

/// `Tr(ρ·O)` for Hermitian observables.
pub trait Expectation {
    fn expectation(&self, obs: &Operator) -> Result<f64>;
}

fn checked_real(z: C64, scale: f64) -> Result<f64> {
    if z.im.abs() > NORM_TOL * scale.max(1.0) {
        return Err(Error::ComplexExpectation(z.im));
    }
    Ok(z.re)
}

impl Expectation for StateVector {
    fn expectation(&self, obs: &Operator) -> Result<f64> {
        if obs.dim() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                got: obs.dim(),
            });
        }
        if !obs.is_hermitian() {
            return Err(Error::NonHermitianInput(hermitian_deviation(obs.matrix())));
        }
        let z = self.amplitudes.dotc(&(obs.matrix() * &self.amplitudes));
        checked_real(z, max_abs(obs.matrix()))
    }
}

impl Expectation for DensityMatrix {
    fn expectation(&self, obs: &Operator) -> Result<f64> {
        if obs.dim() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                got: obs.dim(),
            });
        }
        if !obs.is_hermitian() {
            return Err(Error::NonHermitianInput(hermitian_deviation(obs.matrix())));
        }
        let z = (&self.matrix * obs.matrix()).trace();
        checked_real(z, max_abs(obs.matrix()))
    }
}

/// Validates a probability vector, clamping roundoff-level negatives, and
/// returns the renormalized copy.
pub fn validate_probabilities(probabilities: &[f64]) -> Result<Vec<f64>> {
    if probabilities.is_empty() {
        return Err(Error::InvalidDistribution(
            "empty probability vector".into(),
        ));
    }
    let mut sum = 0.0;
    for &p in probabilities {
        if !p.is_finite() || p < -1e-10 {
            return Err(Error::InvalidDistribution(format!("probability {p}")));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidDistribution(format!(
            "probabilities sum to {sum}"
        )));
    }
    let clamped: Vec<f64> = probabilities.iter().map(|&p| p.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    Ok(clamped.into_iter().map(|p| p / total).collect())
}

/// Draws one outcome index from `probabilities`.
pub fn sample_outcome<R: Rng + ?Sized>(probabilities: &[f64], rng: &mut R) -> Result<usize> {
    let probs = validate_probabilities(probabilities)?;
    Ok(draw_index(&probs, rng))
}

pub(crate) fn draw_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let r: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if r < acc {
            return i;
        }
    }
    // r landed in the roundoff gap above the cumulative sum
    probs
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(probs.len() - 1)
}

/// Pauli matrices and other single-qubit constants.
pub mod pauli {
    use super::*;

    fn op(entries: [C64; 4]) -> Operator {
        Operator::from_rows(2, &entries).expect("2x2 constant")
    }

    pub fn id() -> Operator {
        Operator::identity(&[2])
    }

    pub fn x() -> Operator {
        op([ZERO, ONE, ONE, ZERO])
    }

    pub fn y() -> Operator {
        op([ZERO, -I, I, ZERO])
    }

    pub fn z() -> Operator {
        op([ONE, ZERO, ZERO, -ONE])
    }

    /// `|1⟩⟨1|`
    pub fn n() -> Operator {
        op([ZERO, ZERO, ZERO, ONE])
    }
}
