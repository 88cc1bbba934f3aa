//! First-passage times of the truncation counts and the step-size window.

use hwconsensus::analysis::{m_of, truncation_times};
use hwconsensus::harness::{builtin_case, run};
use hwconsensus::noise::NoiseInjection;

fn main() {
    let mut s = builtin_case(2).unwrap().noise_free().with_horizon(1_000);
    s.noise.injections.push(NoiseInjection { step: 500, observer: 1, observed: 4, value: -1e5 });
    let r = run(&s, 0).unwrap();
    let t = truncation_times(&r.log);
    let d = s.topology.diameter().unwrap();
    println!("highest level {}, graph diameter {d}", t.max_level());
    for m in (t.max_level().saturating_sub(3))..=t.max_level() + 1 {
        let per: Vec<String> = (0..4)
            .map(|i| t.r_agent(i, m).map_or("∞".into(), |x| x.to_string()))
            .collect();
        let rm = t.r(m).map_or("∞".into(), |x| x.to_string());
        println!("  m={m:>3}: r(m)={rm:>4}, r(i,m) = [{}]", per.join(", "));
    }
    println!("lag check: {:?}", t.check_lag(d));

    println!("\nm(k,T) with bounds (k−1)e^T−1 < m < k·e^T−1:");
    for (k, tt) in [(1, 1.0), (10, std::f64::consts::LN_2), (100, 0.5), (1000, 2.0), (5, 0.1)] {
        let w = m_of(k, tt);
        let e = f64::exp(tt);
        println!(
            "  k={k:>4} T={tt:.3}: m={:>5}{}  ({:.1} < m < {:.1})",
            w.m,
            if w.degenerate { " (empty window)" } else { "" },
            (k as f64 - 1.0) * e - 1.0,
            k as f64 * e - 1.0
        );
    }
}
