//! Finite-difference Fisher information of parametrized outcome laws and states.

use crate::qcore::{CVector, C64};

/// Five-point central derivative of a vector-valued map.
fn derivative<F, T>(f: &F, x: f64, h: f64, combine: impl Fn(&[T; 4]) -> T) -> (T, T)
where
    F: Fn(f64) -> T,
{
    let pts = [f(x - 2.0 * h), f(x - h), f(x + h), f(x + 2.0 * h)];
    (f(x), combine(&pts))
}

/// `Σ_k (∂p_k)²/p_k` at `omega`, skipping outcomes with vanishing probability.
pub fn classical_fisher<F: Fn(f64) -> Vec<f64>>(probs: F, omega: f64, h: f64) -> f64 {
    let (p, dp) = derivative(&probs, omega, h, |[m2, m1, p1, p2]| {
        (0..m2.len())
            .map(|k| (m2[k] - 8.0 * m1[k] + 8.0 * p1[k] - p2[k]) / (12.0 * h))
            .collect::<Vec<_>>()
    });
    p.iter()
        .zip(&dp)
        .filter(|(&pk, _)| pk > 1e-14)
        .map(|(pk, d)| d * d / pk)
        .sum()
}

/// Pure-state QFI `4(⟨∂ψ|∂ψ⟩ − |⟨ψ|∂ψ⟩|²)`.
pub fn pure_state_qfi<F: Fn(f64) -> CVector>(state: F, omega: f64, h: f64) -> f64 {
    let (psi, dpsi) = derivative(&state, omega, h, |[m2, m1, p1, p2]| {
        (m2 - m1 * C64::new(8.0, 0.0) + p1 * C64::new(8.0, 0.0) - p2) / C64::new(12.0 * h, 0.0)
    });
    let overlap = psi.dotc(&dpsi);
    4.0 * (dpsi.norm_squared() - overlap.norm_sqr())
}
