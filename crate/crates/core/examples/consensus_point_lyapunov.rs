//! Where a noise-free run ends up, and how the Lyapunov function decays on
//! the way there.

use hwconsensus::analysis::numeric::QUADRATURE_TOL;
use hwconsensus::analysis::{consensus_metrics, consensus_point, gain_roots, lyapunov_v};
use hwconsensus::harness::{builtin_case, run};

fn main() {
    let s = builtin_case(3).unwrap().noise_free().with_horizon(100_000);
    let gains = s.gains().unwrap();
    let r = run(&s, 0).unwrap();
    let u_final = &r.summary.final_u;
    let c: f64 = u_final.iter().sum();
    let p = consensus_point(&gains, c, 1e-9).unwrap();
    println!("simulated u_K   = {u_final:.6?}");
    println!("consensus point = {:.6?} (common output {:.6}, Σu = {c:.6})", p.u, p.b);

    let roots = gain_roots(&gains).unwrap();
    println!("roots of h: {roots:.4?}, v there = {}", lyapunov_v(&roots, &gains, QUADRATURE_TOL).unwrap());

    let metrics = consensus_metrics(&r.log, &gains, &s.topology.laplacian()).unwrap();
    for k in [1u64, 10, 100, 1_000, 10_000, 100_000] {
        let m = &metrics[(k - 1) as usize];
        println!(
            "k={k:>6}: spread {:.3e}, residual {:.3e}, σ̄ {:>2}, v {:.6}",
            m.spread_y, m.residual, m.sigma_bar, m.v
        );
    }
}
