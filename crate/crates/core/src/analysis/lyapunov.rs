//! `v(u) = Σ_i ∫_{u_i⁰}^{u_i} h_i(t) dt`, whose gradient is `h(u)`.

use crate::plant::StaticGain;

use super::consensus_point::invert_gain;
use super::numeric::integrate;
use super::AnalysisError;

/// Roots `u_i⁰` of each `h_i`.
pub fn gain_roots(gains: &[StaticGain]) -> Result<Vec<f64>, AnalysisError> {
    gains.iter().map(|g| invert_gain(g, 0.0)).collect()
}

/// `v(u)` given precomputed roots.
pub fn lyapunov_with_roots(u: &[f64], gains: &[StaticGain], roots: &[f64], tol: f64) -> f64 {
    u.iter()
        .zip(gains)
        .zip(roots)
        .map(|((&x, g), &r)| integrate(&|t| g.h(t), r, x, tol))
        .sum()
}

pub fn lyapunov_v(u: &[f64], gains: &[StaticGain], tol: f64) -> Result<f64, AnalysisError> {
    if u.len() != gains.len() {
        return Err(AnalysisError::DimensionMismatch {
            expected: gains.len(),
            got: u.len(),
        });
    }
    let roots = gain_roots(gains)?;
    Ok(lyapunov_with_roots(u, gains, &roots, tol))
}

/// Largest `|∂v/∂u_i − h_i(u_i)|` using central differences of width `2δ`.
pub fn lyapunov_gradient_error(
    u: &[f64],
    gains: &[StaticGain],
    delta: f64,
    tol: f64,
) -> Result<f64, AnalysisError> {
    let roots = gain_roots(gains)?;
    let mut worst = 0.0f64;
    let mut probe = u.to_vec();
    for i in 0..u.len() {
        probe[i] = u[i] + delta;
        let up = lyapunov_with_roots(&probe, gains, &roots, tol);
        probe[i] = u[i] - delta;
        let down = lyapunov_with_roots(&probe, gains, &roots, tol);
        probe[i] = u[i];
        let fd = (up - down) / (2.0 * delta);
        worst = worst.max((fd - gains[i].h(u[i])).abs());
    }
    Ok(worst)
}
