//! Shared fixtures for the benchmarks.

use tdi_sense::experiment::{ExperimentConfig, Mode, OmegaSpec};
use tdi_sense::strategies::{build_ce_swap, build_fe_swap, ControlModel};
use tdi_sense::{PhysicalParams, Strategy};

/// Reference parameters: ω = 1/300, g = 10, T = 80π.
pub fn params() -> PhysicalParams {
    PhysicalParams::reference()
}

/// FE-SWAP and physical-control CE-SWAP at the reference parameters.
pub fn swap_strategies() -> [Strategy; 2] {
    let p = params();
    [
        build_fe_swap(&p).expect("fe swap"),
        build_ce_swap(&p, ControlModel::Physical).expect("ce swap"),
    ]
}

/// Single-point config with `repetitions` Monte-Carlo experiments.
pub fn config(mode: Mode, repetitions: usize) -> ExperimentConfig {
    ExperimentConfig {
        omega: OmegaSpec::Fixed(params().omega),
        mode,
        repetitions,
        ..Default::default()
    }
}
