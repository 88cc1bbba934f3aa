//! Rewrites a distributed run as one centralized truncated recursion and
//! replays it. Also shows why the catch-up step needs special care.

use hwconsensus::analysis::{build_auxiliary, verify_centralized_recursion, CatchUpConvention};
use hwconsensus::harness::{builtin_case, run};
use hwconsensus::noise::NoiseInjection;

fn main() {
    let mut s = builtin_case(1).unwrap().with_horizon(20_000);
    // force a late truncation on agent 2 so catch-up windows appear
    s.noise.injections.push(NoiseInjection { step: 5_000, observer: 2, observed: 1, value: 1e5 });
    let r = run(&s, 7).unwrap();
    let gains = s.gains().unwrap();

    for convention in [CatchUpConvention::CatchUpAware, CatchUpConvention::AsPrinted] {
        let aux = build_auxiliary(&r.log, &gains, &s.topology, convention).unwrap();
        let check = verify_centralized_recursion(&aux, &s.schedule());
        println!(
            "{convention:?}: σ̄_K = {}, residual {:.3e}, σ̄ mismatches {}, indicator departures {}, pass {}",
            aux.sigma_bar.last().unwrap(),
            check.max_abs_residual,
            check.sigma_mismatches,
            aux.indicator_departures(),
            check.pass
        );
    }

    let mut aux = build_auxiliary(&r.log, &gains, &s.topology, CatchUpConvention::default()).unwrap();
    aux.u_bar_mut(10_000)[0] += 1e-3;
    let check = verify_centralized_recursion(&aux, &s.schedule());
    println!("after perturbing one entry by 1e-3: residual {:.3e}, pass {}", check.max_abs_residual, check.pass);
}
