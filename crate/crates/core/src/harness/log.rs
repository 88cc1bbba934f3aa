//! In-memory trajectory record and its CSV form.
//!
//! Row `k` of the log holds, for every agent, the quantities produced while
//! moving from step `k` to `k + 1`: `u_{i,k}`, `σ_{i,k}`, `σ'_{i,k}`, `u'_{i,k}`,
//! `y_{i,k+1}`, `O_{i,k+1}`; and for every directed link `z_{ij,k+1}`,
//! `ε_{ij,k+1}`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::controller::Schedule;

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const EDGES_FILE: &str = "edges.csv";
pub const SCENARIO_FILE: &str = "scenario.json";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Error)]
pub enum LogError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed log: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentRecord {
    pub u: f64,
    pub sigma: u64,
    pub sigma_prime: u64,
    pub u_prime: f64,
    pub y_next: f64,
    pub o_next: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub z: f64,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    n: usize,
    /// Ordered `(observer, observed)` pairs, 0-based.
    pairs: Vec<(usize, usize)>,
    pub stride: u64,
    pub schedule: Schedule,
    pub u_star: Vec<f64>,
    pub scenario_hash: String,
    steps: Vec<u64>,
    agents: Vec<AgentRecord>,
    edges: Vec<EdgeRecord>,
}

impl TrajectoryLog {
    pub fn new(
        n: usize,
        pairs: Vec<(usize, usize)>,
        stride: u64,
        schedule: Schedule,
        u_star: Vec<f64>,
        scenario_hash: String,
    ) -> Self {
        Self {
            n,
            pairs,
            stride,
            schedule,
            u_star,
            scenario_hash,
            steps: Vec::new(),
            agents: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn push(&mut self, k: u64, agents: &[AgentRecord], edges: &[EdgeRecord]) {
        assert_eq!(agents.len(), self.n);
        assert_eq!(edges.len(), self.pairs.len());
        self.steps.push(k);
        self.agents.extend_from_slice(agents);
        self.edges.extend_from_slice(edges);
    }

    pub fn agent_count(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Step index `k` of row `row`.
    pub fn step_at(&self, row: usize) -> u64 {
        self.steps[row]
    }

    pub fn steps(&self) -> &[u64] {
        &self.steps
    }

    pub fn agents_at(&self, row: usize) -> &[AgentRecord] {
        &self.agents[row * self.n..(row + 1) * self.n]
    }

    pub fn agents_at_mut(&mut self, row: usize) -> &mut [AgentRecord] {
        &mut self.agents[row * self.n..(row + 1) * self.n]
    }

    pub fn edges_at(&self, row: usize) -> &[EdgeRecord] {
        let m = self.pairs.len();
        &self.edges[row * m..(row + 1) * m]
    }

    /// Row holding step `k`, if logged.
    pub fn row_of(&self, k: u64) -> Option<usize> {
        self.steps.binary_search(&k).ok()
    }

    /// `u_{·,k}` of a row.
    pub fn u_at(&self, row: usize) -> Vec<f64> {
        self.agents_at(row).iter().map(|a| a.u).collect()
    }

    pub fn sigma_at(&self, row: usize) -> Vec<u64> {
        self.agents_at(row).iter().map(|a| a.sigma).collect()
    }

    /// True when rows are exactly `k = 1, 2, …, len`.
    pub fn is_contiguous(&self) -> bool {
        self.steps.iter().enumerate().all(|(r, &k)| k == r as u64 + 1)
    }

    pub fn write_csv(&self, dir: &Path) -> Result<(), LogError> {
        let mut traj = BufWriter::new(File::create(dir.join(TRAJECTORY_FILE))?);
        writeln!(traj, "k,agent,u,sigma,sigma_prime,u_prime,y_next,O_next")?;
        for (row, &k) in self.steps.iter().enumerate() {
            for (i, a) in self.agents_at(row).iter().enumerate() {
                writeln!(
                    traj,
                    "{k},{},{},{},{},{},{},{}",
                    i + 1,
                    a.u,
                    a.sigma,
                    a.sigma_prime,
                    a.u_prime,
                    a.y_next,
                    a.o_next
                )?;
            }
        }
        traj.flush()?;

        let mut edges = BufWriter::new(File::create(dir.join(EDGES_FILE))?);
        writeln!(edges, "k,i,j,z,eps")?;
        for (row, &k) in self.steps.iter().enumerate() {
            for (&(i, j), e) in self.pairs.iter().zip(self.edges_at(row)) {
                writeln!(edges, "{k},{},{},{},{}", i + 1, j + 1, e.z, e.eps)?;
            }
        }
        edges.flush()?;
        Ok(())
    }

    /// Reads the CSV pair back. `pairs`, `schedule`, `u_star` come from the
    /// scenario stored alongside.
    pub fn read_csv(
        dir: &Path,
        n: usize,
        pairs: Vec<(usize, usize)>,
        stride: u64,
        schedule: Schedule,
        u_star: Vec<f64>,
        scenario_hash: String,
    ) -> Result<Self, LogError> {
        #[derive(Deserialize)]
        struct TrajRow {
            k: u64,
            agent: usize,
            u: f64,
            sigma: u64,
            sigma_prime: u64,
            u_prime: f64,
            y_next: f64,
            #[serde(rename = "O_next")]
            o_next: f64,
        }
        #[derive(Deserialize)]
        struct EdgeRow {
            k: u64,
            i: usize,
            j: usize,
            z: f64,
            eps: f64,
        }

        let mut log = Self::new(n, pairs, stride, schedule, u_star, scenario_hash);
        let malformed = |m: String| LogError::Malformed(m);

        let mut traj = csv::Reader::from_path(dir.join(TRAJECTORY_FILE))?;
        let mut edges_rdr = csv::Reader::from_path(dir.join(EDGES_FILE))?;
        let mut traj_rows = traj.deserialize::<TrajRow>();
        let mut edge_rows = edges_rdr.deserialize::<EdgeRow>();
        let mut agents = Vec::with_capacity(n);
        let mut edges = Vec::with_capacity(log.pairs.len());
        loop {
            agents.clear();
            let mut k_row = None;
            for i in 0..n {
                let Some(row) = traj_rows.next() else {
                    if i == 0 {
                        break;
                    }
                    return Err(malformed(format!("trajectory ends mid-step at agent {}", i + 1)));
                };
                let row = row?;
                if row.agent != i + 1 || k_row.is_some_and(|k| k != row.k) {
                    return Err(malformed(format!("unexpected row k={} agent={}", row.k, row.agent)));
                }
                k_row = Some(row.k);
                agents.push(AgentRecord {
                    u: row.u,
                    sigma: row.sigma,
                    sigma_prime: row.sigma_prime,
                    u_prime: row.u_prime,
                    y_next: row.y_next,
                    o_next: row.o_next,
                });
            }
            let Some(k) = k_row else { break };
            edges.clear();
            for &(i, j) in &log.pairs {
                let row = edge_rows
                    .next()
                    .ok_or_else(|| malformed(format!("edge file ends before step {k}")))??;
                if row.k != k || row.i != i + 1 || row.j != j + 1 {
                    return Err(malformed(format!(
                        "edge row k={} ({},{}) does not match step {k} link ({},{})",
                        row.k,
                        row.i,
                        row.j,
                        i + 1,
                        j + 1
                    )));
                }
                edges.push(EdgeRecord { z: row.z, eps: row.eps });
            }
            if log.steps.last().is_some_and(|&prev| prev >= k) {
                return Err(malformed(format!("step {k} out of order")));
            }
            log.push(k, &agents, &edges);
        }
        if edge_rows.next().is_some() {
            return Err(malformed("edge file has rows beyond the trajectory".into()));
        }
        Ok(log)
    }
}
