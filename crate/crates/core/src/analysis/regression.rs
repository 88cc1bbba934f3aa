//! The regression field `g(u) = −L h(u)` whose zeros are the consensus set.

use crate::graph::LaplacianView;
use crate::plant::StaticGain;

use super::AnalysisError;

/// Relative agreement demanded between the neighbor-sum and matrix forms.
pub const CROSS_CHECK_TOL: f64 = 1e-12;

pub fn h_vector(u: &[f64], gains: &[StaticGain]) -> Vec<f64> {
    u.iter().zip(gains).map(|(&x, g)| g.h(x)).collect()
}

/// `g_i(u) = Σ_j p_ij (h_j(u_j) − h_i(u_i))`, cross-checked against `−L h(u)`.
pub fn regression_g(
    u: &[f64],
    gains: &[StaticGain],
    laplacian: &LaplacianView,
) -> Result<Vec<f64>, AnalysisError> {
    let n = laplacian.dim();
    if u.len() != n || gains.len() != n {
        return Err(AnalysisError::DimensionMismatch {
            expected: n,
            got: if u.len() != n { u.len() } else { gains.len() },
        });
    }
    let h = h_vector(u, gains);
    let p = &laplacian.adjacency;
    let g: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| p[(i, j)] * (h[j] - h[i])).sum())
        .collect();
    let lh = laplacian.apply(&h);
    let scale = 1.0 + h.iter().fold(0.0f64, |m, x| m.max(x.abs())) * laplacian.degree.max();
    for (i, (a, b)) in g.iter().zip(&lh).enumerate() {
        if (a + b).abs() > CROSS_CHECK_TOL * scale {
            return Err(AnalysisError::CrossCheck {
                what: "regression field",
                index: i,
                error: (a + b).abs(),
            });
        }
    }
    Ok(g)
}

/// `g_i(u)` for a single agent from its neighbor list.
pub fn g_component(i: usize, h: &[f64], topology: &crate::graph::Topology) -> f64 {
    topology
        .neighbors(i)
        .iter()
        .map(|&(j, p)| p * (h[j] - h[i]))
        .sum()
}

/// `‖L h(u)‖_∞`.
pub fn consensus_residual(u: &[f64], gains: &[StaticGain], laplacian: &LaplacianView) -> f64 {
    laplacian
        .apply(&h_vector(u, gains))
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()))
}
