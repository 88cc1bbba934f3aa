//! Synchronous network simulation.
//!
//! Each global step `k → k + 1`:
//! 1. every agent applies `u_{i,k}` and its plant yields `y_{i,k+1}`;
//! 2. every observer draws `z_{ij,k+1} = y_{j,k+1} + ε_{ij,k+1}` and reads the
//!    neighbor counts `σ_{j,k}` from a snapshot of step `k`;
//! 3. every controller updates to `(u_{i,k+1}, σ_{i,k+1})`.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::regression::consensus_residual;
use crate::controller::{self, ControllerState, NeighborInput};
use crate::noise::EdgeStream;
use crate::plant::{AgentPlant, PlantError};

use super::log::{
    AgentRecord, EdgeRecord, LogError, TrajectoryLog, SCENARIO_FILE, SUMMARY_FILE,
};
use super::scenario::{Scenario, ScenarioError};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Validation(#[from] ScenarioError),
    #[error("agent {agent} diverged at step {step}: {source}")]
    NonFinite {
        step: u64,
        agent: usize,
        source: PlantError,
        partial: Box<TrajectoryLog>,
    },
    #[error("batch needs at least one seed")]
    NoSeeds,
    #[error(transparent)]
    Log(#[from] LogError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub label: String,
    pub seed: u64,
    pub scenario_hash: String,
    pub steps: u64,
    /// `max_{i,j} |y_{i,K+1} − y_{j,K+1}|`.
    pub final_spread: f64,
    /// `‖L h(u_K)‖_∞`.
    pub final_residual: f64,
    /// `σ_{i,K}` for each agent.
    pub truncations: Vec<u64>,
    pub sigma_bar_final: u64,
    pub final_u: Vec<f64>,
    pub final_y: Vec<f64>,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub log: TrajectoryLog,
    pub summary: RunSummary,
}

/// Runs `scenario` with the noise seed replaced by `master_seed`.
pub fn run(scenario: &Scenario, master_seed: u64) -> Result<RunResult, SimError> {
    scenario.validate(false)?;
    let started = Instant::now();
    let n = scenario.agent_count();
    let topo = &scenario.topology;
    let schedule = scenario.schedule();
    let mut effective = scenario.clone();
    effective.noise.master_seed = master_seed;
    let noise = &effective.noise;

    let mut plants: Vec<AgentPlant> = scenario.agents.iter().map(|a| a.build()).collect();
    let initial = scenario.controller.initial();
    let mut states: Vec<ControllerState> = initial
        .iter()
        .zip(&scenario.controller.u_star)
        .map(|(&u, &u_star)| ControllerState::new(u, u_star))
        .collect();
    let pairs = topo.directed_pairs();
    let mut streams: Vec<EdgeStream> = pairs
        .iter()
        .map(|&(i, j)| noise.stream_for(topo, i + 1, j + 1))
        .collect::<Result<_, _>>()
        .map_err(ScenarioError::from)?;
    // index into `pairs` for each (observer, neighbor slot)
    let pair_index: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            topo.neighbors(i)
                .iter()
                .map(|&(j, _)| pairs.iter().position(|&p| p == (i, j)).expect("pair listed"))
                .collect()
        })
        .collect();

    let mut log = TrajectoryLog::new(
        n,
        pairs.clone(),
        scenario.log_stride,
        schedule,
        scenario.controller.u_star.clone(),
        effective.content_hash(),
    );
    let mut y_next = vec![0.0; n];
    let mut edge_rows = vec![EdgeRecord { z: 0.0, eps: 0.0 }; pairs.len()];
    let mut agent_rows = vec![
        AgentRecord {
            u: 0.0,
            sigma: 0,
            sigma_prime: 0,
            u_prime: 0.0,
            y_next: 0.0,
            o_next: 0.0,
        };
        n
    ];
    let mut neighbor_buf = Vec::new();

    for k in 1..=scenario.horizon {
        for (i, plant) in plants.iter_mut().enumerate() {
            match plant.step(states[i].u) {
                Ok(y) => y_next[i] = y,
                Err(source) => {
                    return Err(SimError::NonFinite {
                        step: k,
                        agent: i + 1,
                        source,
                        partial: Box::new(log),
                    })
                }
            }
        }
        for ((&(_, j), stream), row) in pairs.iter().zip(&mut streams).zip(&mut edge_rows) {
            let eps = stream.sample();
            *row = EdgeRecord {
                z: y_next[j] + eps,
                eps,
            };
        }
        let snapshot: Vec<u64> = states.iter().map(|s| s.sigma).collect();
        for i in 0..n {
            neighbor_buf.clear();
            neighbor_buf.extend(topo.neighbors(i).iter().zip(&pair_index[i]).map(
                |(&(j, weight), &e)| NeighborInput {
                    weight,
                    observation: edge_rows[e].z,
                    sigma: snapshot[j],
                },
            ));
            let trace = controller::step(&states[i], y_next[i], &neighbor_buf, k, &schedule);
            agent_rows[i] = AgentRecord {
                u: states[i].u,
                sigma: states[i].sigma,
                sigma_prime: trace.sigma_pooled,
                u_prime: trace.u_prime,
                y_next: y_next[i],
                o_next: trace.observation,
            };
            states[i] = trace.next;
        }
        let stride = scenario.log_stride;
        if stride == 1 || (k - 1) % stride == 0 || k == scenario.horizon {
            log.push(k, &agent_rows, &edge_rows);
        }
    }

    let gains = scenario.gains().map_err(ScenarioError::from)?;
    let mut summary = summarize(&log, &gains, &scenario.topology.laplacian(), &scenario.label, master_seed);
    summary.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(RunResult { log, summary })
}

/// Summary derived from the final logged row only.
pub fn summarize(
    log: &TrajectoryLog,
    gains: &[crate::plant::StaticGain],
    laplacian: &crate::graph::LaplacianView,
    label: &str,
    seed: u64,
) -> RunSummary {
    let last = log.len().checked_sub(1);
    let (final_u, final_y, truncations, steps) = match last {
        Some(row) => {
            let a = log.agents_at(row);
            (
                a.iter().map(|r| r.u).collect::<Vec<_>>(),
                a.iter().map(|r| r.y_next).collect::<Vec<_>>(),
                a.iter().map(|r| r.sigma).collect::<Vec<_>>(),
                log.step_at(row),
            )
        }
        None => (vec![], vec![], vec![], 0),
    };
    let spread = spread(&final_y);
    let residual = if final_u.is_empty() {
        0.0
    } else {
        consensus_residual(&final_u, gains, laplacian)
    };
    RunSummary {
        label: label.to_string(),
        seed,
        scenario_hash: log.scenario_hash.clone(),
        steps,
        final_spread: spread,
        final_residual: residual,
        sigma_bar_final: truncations.iter().copied().max().unwrap_or(0),
        truncations,
        final_u,
        final_y,
        wall_time_ms: 0.0,
    }
}

/// `max_i y_i − min_i y_i`.
pub fn spread(y: &[f64]) -> f64 {
    let max = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = y.iter().copied().fold(f64::INFINITY, f64::min);
    if y.is_empty() {
        0.0
    } else {
        max - min
    }
}

/// Independent runs of one scenario, returned in input seed order.
pub fn batch(scenario: &Scenario, seeds: &[u64]) -> Result<Vec<Result<RunResult, SimError>>, SimError> {
    if seeds.is_empty() {
        return Err(SimError::NoSeeds);
    }
    let mut sorted = seeds.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        log::warn!("{}: duplicate seeds in batch; results will repeat", scenario.label);
    }
    Ok(seeds.par_iter().map(|&seed| run(scenario, seed)).collect())
}

/// Writes scenario, trajectory, edge and summary files into `dir`.
pub fn write_run(dir: &Path, scenario: &Scenario, result: &RunResult) -> Result<(), LogError> {
    std::fs::create_dir_all(dir)?;
    let mut stored = scenario.clone();
    stored.noise.master_seed = result.summary.seed;
    std::fs::write(dir.join(SCENARIO_FILE), stored.to_json())?;
    result.log.write_csv(dir)?;
    let summary = serde_json::to_string_pretty(&result.summary)
        .map_err(|e| LogError::Malformed(e.to_string()))?;
    std::fs::write(dir.join(SUMMARY_FILE), summary)?;
    Ok(())
}

/// Loads a directory written by [`write_run`].
pub fn read_run(dir: &Path) -> Result<(Scenario, TrajectoryLog), SimError> {
    let scenario = Scenario::load(&dir.join(SCENARIO_FILE))?;
    let log = TrajectoryLog::read_csv(
        dir,
        scenario.agent_count(),
        scenario.topology.directed_pairs(),
        scenario.log_stride,
        scenario.schedule(),
        scenario.controller.u_star.clone(),
        scenario.content_hash(),
    )?;
    Ok((scenario, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::builtin::{builtin_case, identity_pair};

    #[test]
    fn short_run_shapes() {
        let s = builtin_case(1).unwrap().with_horizon(200);
        let r = run(&s, 7).unwrap();
        assert_eq!(r.log.len(), 200);
        assert!(r.log.is_contiguous());
        assert_eq!(r.summary.steps, 200);
        assert_eq!(r.log.pairs().len(), 8);
        // first row: u_{i,1} = 0, σ = 0, plants at rest
        let first = r.log.agents_at(0);
        assert!(first.iter().all(|a| a.u == 0.0 && a.sigma == 0));
        assert_eq!(first[1].y_next, 1.0); // f_2(0) = 1 passes straight through
    }

    #[test]
    fn replay_is_bit_identical() {
        let s = builtin_case(2).unwrap().with_horizon(2_000);
        let a = run(&s, 9).unwrap();
        let b = run(&s, 9).unwrap();
        assert_eq!(a.log, b.log);
        let c = run(&s, 10).unwrap();
        assert_ne!(a.log, c.log);
    }

    #[test]
    fn strided_logging_keeps_first_and_last() {
        let mut s = builtin_case(3).unwrap().with_horizon(1_000);
        s.log_stride = 100;
        let r = run(&s, 1).unwrap();
        assert_eq!(r.log.steps().first(), Some(&1));
        assert_eq!(r.log.steps().last(), Some(&1_000));
        assert_eq!(r.log.len(), 11);
        assert!(!r.log.is_contiguous());
    }

    #[test]
    fn identity_pair_reaches_average_consensus() {
        let r = run(&identity_pair(), 0).unwrap();
        let u = &r.summary.final_u;
        assert!((u[0] - u[1]).abs() < 1e-3, "{u:?}");
        // memoryless identity plants: the sum of inputs is preserved
        assert!((u[0] + u[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn divergence_aborts_with_partial_log() {
        use crate::nonlinearity::Nonlinearity;
        use crate::polynomial::Polynomial;
        let mut s = identity_pair().with_horizon(500);
        s.agents[0].c = Polynomial::new(vec![1.0, -1.9]).unwrap();
        s.agents[0].f = Nonlinearity::Polynomial(vec![0.0, 1.0, 0.0, 0.0, 0.0, 1e300]);
        match run(&s, 0) {
            Err(SimError::NonFinite { agent, partial, .. }) => {
                assert_eq!(agent, 1);
                assert!(partial.len() < 500);
            }
            other => panic!("expected divergence, got {:?}", other.map(|r| r.summary)),
        }
    }

    #[test]
    fn batch_orders_by_input_and_rejects_empty() {
        let s = builtin_case(1).unwrap().with_horizon(300);
        assert!(matches!(batch(&s, &[]), Err(SimError::NoSeeds)));
        let out = batch(&s, &[3, 1, 3]).unwrap();
        let seeds: Vec<u64> = out.iter().map(|r| r.as_ref().unwrap().summary.seed).collect();
        assert_eq!(seeds, vec![3, 1, 3]);
        assert_eq!(out[0].as_ref().unwrap().log, out[2].as_ref().unwrap().log);
    }

    #[test]
    fn files_round_trip_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let s = builtin_case(1).unwrap().with_horizon(500);
        let r = run(&s, 4).unwrap();
        write_run(dir.path(), &s, &r).unwrap();
        let (back_s, back_log) = read_run(dir.path()).unwrap();
        assert_eq!(back_s.noise.master_seed, 4);
        assert_eq!(back_log, r.log);
    }
}
