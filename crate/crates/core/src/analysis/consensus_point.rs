//! The unique consensus input with a prescribed coordinate sum.

use serde::Serialize;

use crate::plant::StaticGain;

use super::numeric::solve_increasing;
use super::AnalysisError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsensusPoint {
    /// Common output level `h_i(u_i)`.
    pub b: f64,
    pub u: Vec<f64>,
}

/// `h⁻¹(b)` for a strictly increasing gain.
pub fn invert_gain(gain: &StaticGain, b: f64) -> Result<f64, AnalysisError> {
    solve_increasing(|x| gain.h(x), b)
}

/// Solves `h_1(u_1) = … = h_N(u_N)`, `Σ u_i = c`.
///
/// The outer bisection runs on the common level `b`, since
/// `b ↦ Σ h_i⁻¹(b)` is increasing; each inverse is itself a bisection.
///
/// Where some `h_j` is flat at the solution, `h_j⁻¹` is so steep that even a
/// fully resolved `b` leaves `Σ u_i` off by more than `tol`. That component
/// then absorbs the remainder, which moves `h_j(u_j)` by no more than the
/// rounding in `b`.
pub fn consensus_point(gains: &[StaticGain], c: f64, tol: f64) -> Result<ConsensusPoint, AnalysisError> {
    let total = |b: f64| -> f64 {
        gains
            .iter()
            .map(|g| invert_gain(g, b).unwrap_or(f64::NAN))
            .sum()
    };
    let b = solve_increasing(total, c)?;
    let mut u = gains
        .iter()
        .map(|g| invert_gain(g, b))
        .collect::<Result<Vec<_>, _>>()?;
    let mut residual = (u.iter().sum::<f64>() - c).abs();
    if residual >= 0.5 * tol && !u.is_empty() {
        let eps = 1e3 * f64::EPSILON * b.abs().max(1.0);
        let mut steepest = (0, f64::NEG_INFINITY);
        for (i, g) in gains.iter().enumerate() {
            let spread = invert_gain(g, b + eps)? - invert_gain(g, b - eps)?;
            if spread > steepest.1 {
                steepest = (i, spread);
            }
        }
        let j = steepest.0;
        let others: f64 = u.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, x)| x).sum();
        u[j] = c - others;
        residual = (u.iter().sum::<f64>() - c).abs();
    }
    if !(residual < tol) {
        return Err(AnalysisError::NotConverged { residual, tol });
    }
    Ok(ConsensusPoint { b, u })
}
