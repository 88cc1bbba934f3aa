//! Splitting the observation error `O_{i,k+1} − g_i(u_k)` into link noise,
//! own-plant transient and neighbor-plant transient.

use crate::graph::Topology;
use crate::harness::log::TrajectoryLog;
use crate::plant::StaticGain;

use super::regression::{g_component, h_vector};
use super::AnalysisError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParts {
    /// `Σ_j p_ij ε_{ij,k+1}`
    pub link: f64,
    /// `p_i (h_i(u_{i,k}) − y_{i,k+1})`
    pub own_transient: f64,
    /// `Σ_j p_ij (y_{j,k+1} − h_j(u_{j,k}))`
    pub neighbor_transient: f64,
}

impl NoiseParts {
    pub fn total(&self) -> f64 {
        self.link + self.own_transient + self.neighbor_transient
    }
}

/// Per-observer lookup from neighbor to link index in the log.
pub(crate) fn link_index(log: &TrajectoryLog, topology: &Topology) -> Vec<Vec<(usize, f64, usize)>> {
    (0..topology.agent_count())
        .map(|i| {
            topology
                .neighbors(i)
                .iter()
                .map(|&(j, p)| {
                    let e = log
                        .pairs()
                        .iter()
                        .position(|&pair| pair == (i, j))
                        .expect("log covers every directed link");
                    (j, p, e)
                })
                .collect()
        })
        .collect()
}

fn parts_at_row(
    log: &TrajectoryLog,
    row: usize,
    i: usize,
    h: &[f64],
    topology: &Topology,
    links: &[Vec<(usize, f64, usize)>],
) -> NoiseParts {
    let agents = log.agents_at(row);
    let edges = log.edges_at(row);
    let mut link = 0.0;
    let mut neighbor_transient = 0.0;
    for &(j, p, e) in &links[i] {
        link += p * edges[e].eps;
        neighbor_transient += p * (agents[j].y_next - h[j]);
    }
    NoiseParts {
        link,
        own_transient: topology.degree(i) * (h[i] - agents[i].y_next),
        neighbor_transient,
    }
}

/// Components for agent `i` (0-based) at step `k`.
pub fn noise_decomposition(
    log: &TrajectoryLog,
    k: u64,
    i: usize,
    gains: &[StaticGain],
    topology: &Topology,
) -> Result<NoiseParts, AnalysisError> {
    let row = log.row_of(k).ok_or(AnalysisError::StepNotLogged(k))?;
    let h = h_vector(&log.u_at(row), gains);
    let links = link_index(log, topology);
    Ok(parts_at_row(log, row, i, &h, topology, &links))
}

/// Largest `|ε¹ + ε² + ε³ − (O_{i,k+1} − g_i(u_k))|` over every logged row and agent.
pub fn decomposition_max_error(log: &TrajectoryLog, gains: &[StaticGain], topology: &Topology) -> f64 {
    let links = link_index(log, topology);
    let mut worst = 0.0f64;
    for row in 0..log.len() {
        let h = h_vector(&log.u_at(row), gains);
        for i in 0..log.agent_count() {
            let parts = parts_at_row(log, row, i, &h, topology, &links);
            let direct = log.agents_at(row)[i].o_next - g_component(i, &h, topology);
            worst = worst.max((parts.total() - direct).abs());
        }
    }
    worst
}
