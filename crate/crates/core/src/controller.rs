//! Per-agent distributed stochastic approximation with expanding truncations.
//!
//! At step `k` agent `i` receives its own output `y_{i,k+1}`, noisy neighbor
//! outputs `z_{ij,k+1}` and neighbor truncation counts `σ_{j,k}`, then:
//!
//! 1. pools `σ'_{i,k} = max(σ_{i,k}, σ_{j,k} : j ∈ N_i)`;
//! 2. falls back to its reset point `u'_{i,k} = u_i*` if `σ'` exceeds its own count;
//! 3. forms `O_{i,k+1} = Σ_j p_ij (z_{ij,k+1} − y_{i,k+1})`;
//! 4. takes the step `u' + a_k O` if it stays strictly inside `M_{σ'}`, otherwise
//!    resets to `u_i*` and counts one more truncation.

use serde::{Deserialize, Serialize};

/// Step sizes `a_k = 1/k` and truncation bounds `M_σ = ln(σ + c_M)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub c_m: f64,
}

impl Schedule {
    pub fn new(c_m: f64) -> Self {
        Self { c_m }
    }

    pub fn step_size(&self, k: u64) -> f64 {
        1.0 / k as f64
    }

    pub fn bound(&self, sigma: u64) -> f64 {
        (sigma as f64 + self.c_m).ln()
    }

    /// `M_0 = ln(c_M)`; every reset point must lie strictly inside it.
    pub fn initial_bound(&self) -> f64 {
        self.bound(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerState {
    pub u: f64,
    pub sigma: u64,
    pub u_star: f64,
}

impl ControllerState {
    /// State at `k = 1`: no truncations yet.
    pub fn new(u_initial: f64, u_star: f64) -> Self {
        Self {
            u: u_initial,
            sigma: 0,
            u_star,
        }
    }
}

/// Neighbor information available to one agent at `k + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborInput {
    pub weight: f64,
    pub observation: f64,
    pub sigma: u64,
}

pub fn pooled_sigma(state: &ControllerState, neighbor_sigmas: impl IntoIterator<Item = u64>) -> u64 {
    neighbor_sigmas.into_iter().fold(state.sigma, u64::max)
}

pub fn catch_up(state: &ControllerState, sigma_pooled: u64) -> f64 {
    debug_assert!(sigma_pooled >= state.sigma);
    if sigma_pooled == state.sigma {
        state.u
    } else {
        state.u_star
    }
}

/// `Σ_j p_ij (z_ij − y_i)`.
pub fn aggregate_observation(own_output: f64, neighbors: &[NeighborInput]) -> f64 {
    neighbors
        .iter()
        .map(|n| n.weight * (n.observation - own_output))
        .sum()
}

/// Expanding-truncation update. A candidate exactly on the bound truncates.
pub fn update(
    state: &ControllerState,
    u_prime: f64,
    sigma_pooled: u64,
    observation: f64,
    k: u64,
    schedule: &Schedule,
) -> ControllerState {
    let candidate = u_prime + schedule.step_size(k) * observation;
    if candidate.abs() < schedule.bound(sigma_pooled) {
        ControllerState {
            u: candidate,
            sigma: sigma_pooled,
            u_star: state.u_star,
        }
    } else {
        ControllerState {
            u: state.u_star,
            sigma: sigma_pooled + 1,
            u_star: state.u_star,
        }
    }
}

/// Every intermediate of one controller step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepTrace {
    pub sigma_pooled: u64,
    pub u_prime: f64,
    pub observation: f64,
    pub next: ControllerState,
}

/// Runs the full step for one agent.
pub fn step(
    state: &ControllerState,
    own_output: f64,
    neighbors: &[NeighborInput],
    k: u64,
    schedule: &Schedule,
) -> StepTrace {
    let sigma_pooled = pooled_sigma(state, neighbors.iter().map(|n| n.sigma));
    let u_prime = catch_up(state, sigma_pooled);
    let observation = aggregate_observation(own_output, neighbors);
    let next = update(state, u_prime, sigma_pooled, observation, k, schedule);
    StepTrace {
        sigma_pooled,
        u_prime,
        observation,
        next,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn state(u: f64, sigma: u64, u_star: f64) -> ControllerState {
        ControllerState { u, sigma, u_star }
    }

    #[test]
    fn pooling() {
        assert_eq!(pooled_sigma(&state(0.0, 2, 0.0), [3, 1]), 3);
        assert_eq!(pooled_sigma(&state(0.0, 5, 0.0), [0, 0]), 5);
        assert_eq!(pooled_sigma(&state(0.0, 0, 0.0), []), 0);
    }

    #[test]
    fn catch_up_cases() {
        assert_eq!(catch_up(&state(1.7, 3, 9.0), 3), 1.7);
        assert_eq!(catch_up(&state(1.7, 2, 9.0), 3), 9.0);
        assert_eq!(catch_up(&state(2.0, 0, 2.0), 1), 2.0);
    }

    #[test]
    fn observation_aggregation() {
        let n = |z| NeighborInput {
            weight: 1.0,
            observation: z,
            sigma: 0,
        };
        assert_eq!(aggregate_observation(0.4, &[n(0.4), n(0.4)]), 0.0);
        assert_eq!(aggregate_observation(0.0, &[n(0.8)]), 0.8);
        assert_eq!(aggregate_observation(0.0, &[n(1.0), n(2.0), n(3.0)]), 6.0);
        let weighted = NeighborInput {
            weight: 2.5,
            observation: 1.0,
            sigma: 0,
        };
        assert_eq!(aggregate_observation(0.0, &[weighted]), 2.5);
    }

    #[test]
    fn update_keeps_or_truncates() {
        let sched = Schedule::new(55.0);
        assert!((sched.bound(0) - 55f64.ln()).abs() < 1e-15);
        let kept = update(&state(1.0, 0, 3.0), 1.0, 0, 1.0, 2, &sched);
        assert_eq!((kept.u, kept.sigma), (1.5, 0));
        let reset = update(&state(4.0, 0, 3.0), 4.0, 0, 1.0, 1, &sched);
        assert_eq!((reset.u, reset.sigma), (3.0, 1));
    }

    #[test]
    fn candidate_on_the_bound_truncates() {
        let sched = Schedule::new(55.0);
        let bound = sched.bound(2);
        let next = update(&state(0.0, 2, -1.0), bound, 2, 0.0, 7, &sched);
        assert_eq!((next.u, next.sigma), (-1.0, 3));
        let next = update(&state(0.0, 2, -1.0), -bound, 2, 0.0, 7, &sched);
        assert_eq!(next.sigma, 3);
    }

    #[test]
    fn fixed_point_without_noise() {
        let sched = Schedule::new(55.0);
        let s = state(0.7, 1, 2.0);
        let n = NeighborInput {
            weight: 1.0,
            observation: 0.25,
            sigma: 1,
        };
        let trace = step(&s, 0.25, &[n, n], 10, &sched);
        assert_eq!(trace.observation, 0.0);
        assert_eq!(trace.next, s);
    }

    proptest! {
        #[test]
        fn update_stays_inside_bound(
            u in -4.0f64..4.0,
            u_star in -4.0f64..4.0,
            sigma in 0u64..20,
            extra in 0u64..3,
            obs in -1e6f64..1e6,
            k in 1u64..100_000,
        ) {
            let sched = Schedule::new(55.0);
            let s = state(u, sigma, u_star);
            let pooled = sigma + extra;
            let u_prime = catch_up(&s, pooled);
            let next = update(&s, u_prime, pooled, obs, k, &sched);
            prop_assert!(next.u.abs() < sched.bound(pooled));
            prop_assert!(next.sigma == pooled || next.sigma == pooled + 1);
            prop_assert!(next.u.abs() < sched.bound(next.sigma));
        }
    }
}
