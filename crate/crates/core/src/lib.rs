//! Frequency estimation with imperfect stopwatches.
//!
//! A qubit probe precessing at an unknown frequency `ω` is strongly coupled to
//! an environment. Every duration the experimenter sets (pulse widths,
//! precession intervals, the interrogation time) is dilated as `t → t(1+u)`
//! with `u` drawn from a bounded distribution on `[-ε, ε]`.
//!
//! The crate provides
//!
//! * [`qcore`]: dense complex linear algebra on small registers,
//! * [`tdi`]: dilation distributions, sampling and quadrature,
//! * [`model`]: SWAP / CNOT / electron–phonon Hamiltonians and the gate set,
//! * [`strategies`]: free-evolution and control-enhanced protocols,
//! * [`bounds`]: closed-form Fisher-information and loss bounds,
//! * [`experiment`]: Monte-Carlo and quadrature sweeps with CSV/JSON output.

pub mod bounds;
pub mod error;
pub mod experiment;
pub mod fisher;
pub mod model;
pub mod qcore;
pub mod rng;
pub mod strategies;
pub mod tdi;

pub use error::{Error, Result};
pub use model::PhysicalParams;
pub use qcore::{DensityMatrix, Operator, StateVector, C64};
pub use strategies::{RunOutcome, Strategy};
pub use tdi::{DilationDraw, TdiDistribution};
