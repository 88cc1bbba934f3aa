//! Runs the three built-in cases with and without noise and prints the
//! summaries. Optional arguments: horizon, seed.
//!
//! ```text
//! cargo run --release --example reproduce_cases -- 100000 7
//! ```

use hwconsensus::harness::{batch, builtin_case, run};

fn main() {
    let mut args = std::env::args().skip(1);
    let horizon: u64 = args.next().map_or(100_000, |a| a.parse().expect("horizon"));
    let seed: u64 = args.next().map_or(7, |a| a.parse().expect("seed"));

    for case in 1..=3 {
        let s = builtin_case(case).unwrap().with_horizon(horizon);
        let kinds: String = s.agents.iter().map(|a| a.kind.letter()).collect();
        println!("case {case} ({kinds})");
        let quiet = run(&s.noise_free(), 0).unwrap().summary;
        println!(
            "  noise-free: spread {:.2e}, residual {:.2e}, σ̄ {}, y ≈ {:.6}",
            quiet.final_spread, quiet.final_residual, quiet.sigma_bar_final, quiet.final_y[0]
        );
        for r in batch(&s, &[seed, seed + 1, seed + 2]).unwrap() {
            let r = r.unwrap().summary;
            println!(
                "  seed {:>3}: spread {:.3}, residual {:.2e}, σ̄ {}, u = {:.3?} ({:.0} ms)",
                r.seed, r.final_spread, r.final_residual, r.sigma_bar_final, r.final_u, r.wall_time_ms
            );
        }
    }
}
