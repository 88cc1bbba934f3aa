//! One agent of each kind: step response, static gain and the state-space
//! cross-check.

use hwconsensus::harness::builtin_case;
use hwconsensus::plant::StateSpacePlant;

fn main() {
    let case3 = builtin_case(3).unwrap();
    for (label, spec) in [("Wiener agent 1", &case3.agents[0]), ("Hammerstein agent 3", &case3.agents[2])] {
        let plant = spec.build();
        let gain = plant.static_gain().unwrap();
        let report = spec.c.check_stability(1e-9).unwrap();
        println!("{label}: C = {:?}, D = {:?}, f = {:?}", spec.c.coeffs(), spec.d.coeffs(), spec.f);
        println!(
            "  roots of C: {:?} (stable: {}), d/c = {:.6}",
            report.roots.iter().map(|z| format!("{:.3}", z)).collect::<Vec<_>>(),
            report.stable,
            gain.ratio()
        );
        let ss = plant.state_space();
        if let Some((r, delta)) = ss.fit_decay(40) {
            println!("  state dimension {}, ‖A^k‖ ≈ {r:.2}·e^(-{delta:.3}k)", ss.dim());
        }

        let u = 1.5;
        let mut direct = plant.clone();
        let mut via_ss = StateSpacePlant::from_plant(&plant);
        let mut y = 0.0;
        for k in 1..=200 {
            y = direct.step(u).unwrap();
            let y_ss = via_ss.step(u);
            if k <= 4 || k % 50 == 0 {
                println!("  k={k:>2}: y = {y:+.6} (state space {y_ss:+.6})");
            }
        }
        println!("  steady state {y:+.8} vs h({u}) = {:+.8}\n", gain.h(u));
    }
}
