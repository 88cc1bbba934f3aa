//! Per-step consensus metrics, the verification report, and partial-sum
//! traces for plotting.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::graph::{LaplacianView, Topology};
use crate::harness::log::TrajectoryLog;
use crate::plant::StaticGain;

use super::auxiliary::{build_auxiliary, verify_centralized_recursion, CatchUpConvention};
use super::decomposition::decomposition_max_error;
use super::lyapunov::{gain_roots, lyapunov_with_roots};
use super::numeric::QUADRATURE_TOL;
use super::regression::consensus_residual;
use super::truncation::{m_of, truncation_times, TruncationTimes};
use super::AnalysisError;

pub const METRICS_FILE: &str = "metrics.csv";
pub const REPORT_FILE: &str = "verification.json";

/// Window lengths used for the `m(k, T)` bound check.
pub const WINDOW_GRID_T: [f64; 4] = [0.1, 0.5, 1.0, 2.0];
pub const WINDOW_GRID_K: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsRow {
    pub k: u64,
    /// `max_{i,j} |y_{i,k+1} − y_{j,k+1}|`.
    pub spread_y: f64,
    /// `‖L h(u_k)‖_∞`.
    pub residual: f64,
    pub sigma_bar: u64,
    pub v: f64,
}

pub fn consensus_metrics(
    log: &TrajectoryLog,
    gains: &[StaticGain],
    laplacian: &LaplacianView,
) -> Result<Vec<MetricsRow>, AnalysisError> {
    let roots = gain_roots(gains)?;
    Ok((0..log.len())
        .map(|row| {
            let agents = log.agents_at(row);
            let (lo, hi) = agents
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| {
                    (lo.min(a.y_next), hi.max(a.y_next))
                });
            let u = log.u_at(row);
            MetricsRow {
                k: log.step_at(row),
                spread_y: hi - lo,
                residual: consensus_residual(&u, gains, laplacian),
                sigma_bar: agents.iter().map(|a| a.sigma).max().unwrap_or(0),
                v: lyapunov_with_roots(&u, gains, &roots, QUADRATURE_TOL),
            }
        })
        .collect())
}

pub fn write_metrics_csv(path: &Path, rows: &[MetricsRow]) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "k,spread_y,residual,sigma_bar,v")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{}", r.k, r.spread_y, r.residual, r.sigma_bar, r.v)?;
    }
    w.flush()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    /// Largest deviation when replaying the centralized recursion.
    pub centralized_residual: f64,
    pub centralized_sigma_mismatches: usize,
    pub centralized_pass: bool,
    /// Catch-up lag never exceeds the graph diameter.
    pub diameter_bound_ok: bool,
    pub diameter: usize,
    pub max_catch_up_lag: u64,
    /// `m(k, T)` stays within its exponential bounds on the reference grid.
    pub window_bound_ok: bool,
    pub decomposition_max_err: f64,
    pub truncation_times: TruncationTimes,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.centralized_pass
            && self.diameter_bound_ok
            && self.window_bound_ok
            && self.decomposition_max_err < 1e-10
    }
}

/// Runs every log-level identity check.
pub fn verification_report(
    log: &TrajectoryLog,
    gains: &[StaticGain],
    topology: &Topology,
) -> Result<VerificationReport, AnalysisError> {
    let aux = build_auxiliary(log, gains, topology, CatchUpConvention::default())?;
    let check = verify_centralized_recursion(&aux, &log.schedule);
    let times = truncation_times(log);
    let diameter = topology
        .diameter()
        .map_err(|e| AnalysisError::IncompleteLog(e.to_string()))?;
    let lag = times.check_lag(diameter);
    let window_bound_ok = WINDOW_GRID_T
        .iter()
        .all(|&t| (1..=WINDOW_GRID_K).all(|k| m_of(k, t).within_bounds(k, t)));
    Ok(VerificationReport {
        centralized_residual: check.max_abs_residual,
        centralized_sigma_mismatches: check.sigma_mismatches,
        centralized_pass: check.pass,
        diameter_bound_ok: lag.ok,
        diameter,
        max_catch_up_lag: lag.max_lag,
        window_bound_ok,
        decomposition_max_err: decomposition_max_error(log, gains, topology),
        truncation_times: times,
    })
}

/// `|Σ_{s=k}^{k+⌊ln k⌋} a_s O_{i,s+1}|` at the given `k`, for steps whose window
/// lies inside the log. Meant for plotting; the decay it displays is an
/// asymptotic statement, not a finite-sample guarantee.
pub fn partial_sum_trace(log: &TrajectoryLog, agent: usize, ks: &[u64]) -> Vec<(u64, f64)> {
    ks.iter()
        .filter_map(|&k| {
            let end = k + (k as f64).ln().floor() as u64;
            let mut acc = 0.0;
            for s in k..=end {
                let row = log.row_of(s)?;
                acc += log.schedule.step_size(s) * log.agents_at(row)[agent].o_next;
            }
            Some((k, acc.abs()))
        })
        .collect()
}
