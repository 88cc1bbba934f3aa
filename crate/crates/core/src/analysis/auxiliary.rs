//! Relabelling a distributed run as one centralized truncated recursion.
//!
//! Between two consecutive global truncations `[r(m), r(m+1))`, an agent whose
//! own counter still lags behind `σ̄_k = max_j σ_{j,k}` is pinned to its reset
//! value, `ū_{i,k} = u_i*`; every other agent keeps `ū_{i,k} = u_{i,k}`. The
//! auxiliary noise is then chosen so that the effective observation
//! `Ō_{i,k+1} = g_i(ū_k) + ε̄_{i,k+1}` drives
//!
//! ```text
//! ū_{k+1} = ū_k + a_k Ō_{k+1}   if ‖ū_k + a_k Ō_{k+1}‖_∞ < M_{σ̄_k}
//!         = u*                  otherwise, with σ̄_{k+1} = σ̄_k + 1
//! ```
//!
//! exactly. Replaying that recursion from the transformed log is a strong
//! end-to-end oracle for the simulator.
//!
//! # Which steps count as "lagging"
//!
//! The textbook choice sets `Ō_{i,k+1} = 0` while `σ_{i,k} < σ̄_k`. That misses
//! the step on which a lagging agent catches up: it reads the higher count
//! from a neighbor, restarts from `u_i*`, and in the same update already adds
//! `a_k O_{i,k+1}`. So `u_{i,k+1} = u_i* + a_k O_{i,k+1}`, not `u_i*`.
//! [`CatchUpConvention::CatchUpAware`] (the default) passes the real
//! observation through on that step by testing the pooled count
//! `σ'_{i,k} = σ̄_k` instead. [`CatchUpConvention::AsPrinted`] keeps the
//! textbook rule and is useful only to demonstrate the mismatch.

use serde::Serialize;

use crate::controller::Schedule;
use crate::graph::Topology;
use crate::harness::log::TrajectoryLog;
use crate::plant::StaticGain;

use super::regression::{g_component, h_vector};
use super::AnalysisError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum CatchUpConvention {
    /// `Ō = O` once the pooled count has caught up.
    #[default]
    CatchUpAware,
    /// `Ō = O` only once the agent's own count has caught up.
    AsPrinted,
}

/// `ū`, `ε̄`, `Ō`, `g(ū)` and `σ̄` for every step `k = 1..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliarySequences {
    n: usize,
    pub convention: CatchUpConvention,
    pub u_star: Vec<f64>,
    /// `σ̄_k`.
    pub sigma_bar: Vec<u64>,
    u_bar: Vec<f64>,
    eps_bar: Vec<f64>,
    o_bar: Vec<f64>,
    g_bar: Vec<f64>,
    /// `O_{i,k+1}` as logged, kept for the indicator check.
    o_raw: Vec<f64>,
    /// Whether `σ_{i,k} = σ̄_k`.
    own_caught_up: Vec<bool>,
}

impl AuxiliarySequences {
    pub fn agent_count(&self) -> usize {
        self.n
    }

    /// Number of steps `K`.
    pub fn len(&self) -> usize {
        self.sigma_bar.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma_bar.is_empty()
    }

    fn span(&self, k: u64) -> std::ops::Range<usize> {
        let row = (k - 1) as usize;
        row * self.n..(row + 1) * self.n
    }

    /// `ū_k` (1-based `k`).
    pub fn u_bar(&self, k: u64) -> &[f64] {
        &self.u_bar[self.span(k)]
    }

    pub fn u_bar_mut(&mut self, k: u64) -> &mut [f64] {
        let s = self.span(k);
        &mut self.u_bar[s]
    }

    /// `ε̄_{k+1}`.
    pub fn eps_bar(&self, k: u64) -> &[f64] {
        &self.eps_bar[self.span(k)]
    }

    /// `Ō_{k+1}`.
    pub fn o_bar(&self, k: u64) -> &[f64] {
        &self.o_bar[self.span(k)]
    }

    /// `g(ū_k)`.
    pub fn g_bar(&self, k: u64) -> &[f64] {
        &self.g_bar[self.span(k)]
    }

    /// Counts entries where `Ō` departs from the own-count indicator rule
    /// (`0` while lagging, `O` after). Under the default convention the only
    /// departures are catch-up steps.
    pub fn indicator_departures(&self) -> usize {
        self.o_bar
            .iter()
            .zip(&self.o_raw)
            .zip(&self.own_caught_up)
            .filter(|&((&ob, &o), &caught)| if caught { ob != o } else { ob != 0.0 })
            .count()
    }
}

/// Transforms a contiguous log into auxiliary sequences.
pub fn build_auxiliary(
    log: &TrajectoryLog,
    gains: &[StaticGain],
    topology: &Topology,
    convention: CatchUpConvention,
) -> Result<AuxiliarySequences, AnalysisError> {
    let n = log.agent_count();
    if gains.len() != n || topology.agent_count() != n || log.u_star.len() != n {
        return Err(AnalysisError::DimensionMismatch {
            expected: n,
            got: gains.len().min(topology.agent_count()).min(log.u_star.len()),
        });
    }
    if log.is_empty() || !log.is_contiguous() {
        return Err(AnalysisError::IncompleteLog(
            "auxiliary sequences need every step from k = 1 (stride 1)".into(),
        ));
    }
    let steps = log.len();
    let mut aux = AuxiliarySequences {
        n,
        convention,
        u_star: log.u_star.clone(),
        sigma_bar: Vec::with_capacity(steps),
        u_bar: Vec::with_capacity(steps * n),
        eps_bar: Vec::with_capacity(steps * n),
        o_bar: Vec::with_capacity(steps * n),
        g_bar: Vec::with_capacity(steps * n),
        o_raw: Vec::with_capacity(steps * n),
        own_caught_up: Vec::with_capacity(steps * n),
    };
    let mut ub = vec![0.0; n];
    for row in 0..steps {
        let agents = log.agents_at(row);
        let sb = agents.iter().map(|a| a.sigma).max().unwrap_or(0);
        for (i, a) in agents.iter().enumerate() {
            ub[i] = if a.sigma < sb { log.u_star[i] } else { a.u };
        }
        let h = h_vector(&ub, gains);
        for (i, a) in agents.iter().enumerate() {
            let g = g_component(i, &h, topology);
            let own = a.sigma == sb;
            let passes = match convention {
                CatchUpConvention::CatchUpAware => a.sigma_prime == sb,
                CatchUpConvention::AsPrinted => own,
            };
            let ob = if passes { a.o_next } else { 0.0 };
            aux.o_bar.push(ob);
            aux.g_bar.push(g);
            aux.eps_bar.push(ob - g);
            aux.o_raw.push(a.o_next);
            aux.own_caught_up.push(own);
        }
        aux.u_bar.extend_from_slice(&ub);
        aux.sigma_bar.push(sb);
    }
    Ok(aux)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecursionCheck {
    pub max_abs_residual: f64,
    /// Steps where the replayed `σ̄` disagrees with the transformed one.
    pub sigma_mismatches: usize,
    pub pass: bool,
}

/// Residual below which the replay counts as exact.
pub const RECURSION_TOL: f64 = 1e-9;

/// Replays the centralized truncated recursion one step at a time.
pub fn verify_centralized_recursion(aux: &AuxiliarySequences, sched: &Schedule) -> RecursionCheck {
    let mut worst = 0.0f64;
    let mut mismatches = 0;
    let mut cand = vec![0.0; aux.n];
    for k in 1..aux.len() as u64 {
        let a = sched.step_size(k);
        let sb = aux.sigma_bar[(k - 1) as usize];
        let ub = aux.u_bar(k);
        let g = aux.g_bar(k);
        let eb = aux.eps_bar(k);
        let mut norm = 0.0f64;
        for i in 0..aux.n {
            cand[i] = ub[i] + a * (g[i] + eb[i]);
            norm = norm.max(cand[i].abs());
        }
        let (pred, sb_next): (&[f64], u64) = if norm < sched.bound(sb) {
            (&cand, sb)
        } else {
            (&aux.u_star, sb + 1)
        };
        if sb_next != aux.sigma_bar[k as usize] {
            mismatches += 1;
        }
        for (p, actual) in pred.iter().zip(aux.u_bar(k + 1)) {
            let r = (p - actual).abs();
            // NaN must never pass silently
            worst = if r.is_nan() { f64::INFINITY } else { worst.max(r) };
        }
    }
    RecursionCheck {
        max_abs_residual: worst,
        sigma_mismatches: mismatches,
        pass: worst < RECURSION_TOL && mismatches == 0,
    }
}
