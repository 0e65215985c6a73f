use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("operator is not Hermitian (max deviation {0:.3e})")]
    NonHermitianInput(f64),
    #[error("operator is not unitary (deviation {0:.3e})")]
    NonUnitary(f64),
    #[error("state is not normalized: norm {0}")]
    Unnormalized(f64),
    #[error("expectation value has imaginary part {0:.3e}")]
    ComplexExpectation(f64),
    #[error("bad subsystem index {index} for {count} subsystems")]
    BadSubsystemIndex { index: usize, count: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid dilation distribution: {0}")]
    InvalidTdi(String),
    #[error("total dimension {dim} exceeds cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },
    #[error("invalid physical parameters: {0}")]
    InvalidParams(String),
    #[error("interaction not decoupled at the measurement time: residual {0:.3e}")]
    DecouplingViolation(f64),
    #[error("estimator argument {0} outside its domain")]
    EstimatorDomain(f64),
    #[error("dilation draw has {got} entries, strategy consumes {expected}")]
    DrawLengthMismatch { expected: usize, got: usize },
    #[error("Fisher information must be positive, got {0}")]
    NonpositiveFisher(f64),
    #[error("csc(ωT') is singular: |sin(ωT')| = {0:.3e}")]
    CscSingularity(f64),
    #[error("|<O_CE>| = {0} is outside the open interval (-1/2, 1/2)")]
    DomainEdge(f64),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
