//! The three things a controller step can do: move, reset, or catch up.

use hwconsensus::controller::{step, ControllerState, NeighborInput, Schedule};

fn show(label: &str, state: &ControllerState, y: f64, nbrs: &[NeighborInput], k: u64, sched: &Schedule) {
    let t = step(state, y, nbrs, k, sched);
    println!(
        "{label:<28} σ'={} u'={:+.3} O={:+.3} bound M_σ'={:.3} → u={:+.4}, σ={}",
        t.sigma_pooled,
        t.u_prime,
        t.observation,
        sched.bound(t.sigma_pooled),
        t.next.u,
        t.next.sigma
    );
}

fn main() {
    let sched = Schedule::new(55.0);
    let state = ControllerState { u: 1.2, sigma: 0, u_star: 2.0 };
    let calm = [
        NeighborInput { weight: 1.0, observation: 0.9, sigma: 0 },
        NeighborInput { weight: 1.0, observation: 1.4, sigma: 0 },
    ];
    show("ordinary step", &state, 1.0, &calm, 10, &sched);

    let wild = [NeighborInput { weight: 1.0, observation: 80.0, sigma: 0 }];
    show("candidate leaves region", &state, 1.0, &wild, 10, &sched);

    let ahead = [NeighborInput { weight: 1.0, observation: 1.1, sigma: 3 }];
    show("neighbor has truncated more", &state, 1.0, &ahead, 10, &sched);
}
