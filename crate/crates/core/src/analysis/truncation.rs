//! First-passage times of the truncation counters and the step-size window
//! `m(k, T)`.

use serde::Serialize;

use crate::harness::log::TrajectoryLog;

/// First-passage times of every truncation level reached in a run.
///
/// `None` stands for an unattained level (infinite time) and serializes as
/// `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationTimes {
    /// `r(m)` for `m = 0..=max_level + 1`; the last entry is always `None`.
    pub global: Vec<Option<u64>>,
    /// `r(i, m)` indexed `[i][m]`, same length as `global`.
    pub per_agent: Vec<Vec<Option<u64>>>,
    /// Last logged step.
    pub horizon: u64,
}

fn first_passage(sigmas: impl Iterator<Item = (u64, u64)>, levels: usize) -> Vec<Option<u64>> {
    let mut out = vec![None; levels];
    let mut reached = 0usize;
    for (k, s) in sigmas {
        while reached < levels && s >= reached as u64 {
            out[reached] = Some(k);
            reached += 1;
        }
        if reached == levels {
            break;
        }
    }
    out
}

/// Computes `r(m)` and `r(i, m)` from a contiguous log.
pub fn truncation_times(log: &TrajectoryLog) -> TruncationTimes {
    let n = log.agent_count();
    let max_level = (0..log.len())
        .flat_map(|row| log.sigma_at(row))
        .max()
        .unwrap_or(0) as usize;
    let levels = max_level + 2;
    let per_agent: Vec<Vec<Option<u64>>> = (0..n)
        .map(|i| {
            first_passage(
                (0..log.len()).map(|row| (log.step_at(row), log.agents_at(row)[i].sigma)),
                levels,
            )
        })
        .collect();
    let global = (0..levels)
        .map(|m| per_agent.iter().filter_map(|r| r[m]).min())
        .collect();
    TruncationTimes {
        global,
        per_agent,
        horizon: log.steps().last().copied().unwrap_or(0),
    }
}

/// Outcome of the catch-up lag check `0 ≤ r(i,m) − r(m) ≤ d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LagReport {
    pub ok: bool,
    /// Largest observed `r(i,m) − r(m)`.
    pub max_lag: u64,
    /// `(agent, level)` pairs (0-based agent) that broke the bound.
    pub violations: Vec<(usize, usize)>,
}

impl TruncationTimes {
    pub fn r(&self, m: usize) -> Option<u64> {
        self.global.get(m).copied().flatten()
    }

    pub fn r_agent(&self, i: usize, m: usize) -> Option<u64> {
        self.per_agent[i].get(m).copied().flatten()
    }

    /// `r̄(i,m) = min(r(i,m), r(m+1))`.
    pub fn r_bar(&self, i: usize, m: usize) -> Option<u64> {
        match (self.r_agent(i, m), self.r(m + 1)) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    /// Highest level reached by any agent.
    pub fn max_level(&self) -> usize {
        self.global.iter().rposition(Option::is_some).unwrap_or(0)
    }

    pub fn truncation_count(&self) -> usize {
        self.max_level()
    }

    /// Checks every attained level against the graph diameter. An agent that
    /// never reaches a level is only a violation when the log extends at
    /// least `diameter` steps past `r(m)`.
    pub fn check_lag(&self, diameter: usize) -> LagReport {
        let d = diameter as u64;
        let mut report = LagReport {
            ok: true,
            max_lag: 0,
            violations: Vec::new(),
        };
        for m in 1..=self.max_level() {
            let Some(rm) = self.r(m) else { continue };
            for i in 0..self.per_agent.len() {
                let lag = match self.r_agent(i, m) {
                    Some(ri) if ri >= rm => ri - rm,
                    Some(_) => u64::MAX,
                    None if rm + d <= self.horizon => u64::MAX,
                    None => continue,
                };
                if lag > d {
                    report.ok = false;
                    report.violations.push((i, m));
                } else {
                    report.max_lag = report.max_lag.max(lag);
                }
            }
        }
        report
    }
}

/// `m(k, T)` together with a flag for the empty-sum case `1/k > T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Window {
    pub m: u64,
    pub degenerate: bool,
}

impl Window {
    /// `(k−1)e^T − 1 < m < k e^T − 1`.
    pub fn within_bounds(&self, k: u64, t: f64) -> bool {
        let m = self.m as f64;
        let e = t.exp();
        (k as f64 - 1.0) * e - 1.0 < m && m < k as f64 * e - 1.0
    }
}

/// Largest `m` with `Σ_{s=k}^{m} 1/s ≤ T`, by direct summation.
///
/// When not even the first term fits the result is `k − 1` with
/// `degenerate` set.
pub fn m_of(k: u64, t: f64) -> Window {
    assert!(k >= 1, "steps start at 1");
    assert!(t > 0.0, "window length must be positive");
    let mut sum = 0.0;
    let mut m = k - 1;
    loop {
        let next = sum + 1.0 / (m + 1) as f64;
        if next > t {
            break;
        }
        sum = next;
        m += 1;
    }
    Window {
        m,
        degenerate: m == k - 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_from_harmonic_sums() {
        assert_eq!(m_of(10, std::f64::consts::LN_2), Window { m: 18, degenerate: false });
        assert_eq!(m_of(1, 1.0), Window { m: 1, degenerate: false });
        assert_eq!(m_of(1, 2.0).m, 3);
        let w = m_of(5, 0.1);
        assert_eq!(w, Window { m: 4, degenerate: true });
        assert!(w.within_bounds(5, 0.1));
    }

    #[test]
    fn window_bounds_on_grid() {
        for &t in &[0.1, 0.5, 1.0, 2.0] {
            for k in 1..=1000 {
                assert!(m_of(k, t).within_bounds(k, t), "k={k} T={t}");
            }
        }
    }

    #[test]
    fn passage_with_jumps() {
        let r = first_passage([(1, 0), (2, 0), (3, 2), (4, 3)].into_iter(), 5);
        assert_eq!(r, vec![Some(1), Some(3), Some(3), Some(4), None]);
    }
}
