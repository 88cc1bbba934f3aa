//! Per-link noise: every directed link gets its own reproducible stream.

use hwconsensus::graph::Topology;
use hwconsensus::noise::{NoiseInjection, NoiseSpec};

fn main() {
    let g = Topology::four_agent_reference();
    let spec = NoiseSpec::gaussian(1.0, 42);
    for (i, j) in g.directed_pairs() {
        let mut s = spec.stream_for(&g, i + 1, j + 1).unwrap();
        let first: Vec<String> = (0..4).map(|_| format!("{:+.3}", s.sample())).collect();
        println!("ε_{}{}: {}", i + 1, j + 1, first.join(" "));
    }

    // sample moments over a long stream
    let mut s = spec.stream_for(&g, 1, 2).unwrap();
    let n = 200_000;
    let (mut m1, mut m2) = (0.0, 0.0);
    for _ in 0..n {
        let x = s.sample();
        m1 += x;
        m2 += x * x;
    }
    println!("mean {:+.4}, variance {:.4} over {n} draws", m1 / n as f64, m2 / n as f64);

    // a scripted spike on top of the random draw
    let mut spiked = spec.clone();
    spiked.injections.push(NoiseInjection { step: 3, observer: 1, observed: 2, value: 100.0 });
    let mut a = spec.stream_for(&g, 1, 2).unwrap();
    let mut b = spiked.stream_for(&g, 1, 2).unwrap();
    for k in 1..=4 {
        println!("k={k}: plain {:+.3}, with injection {:+.3}", a.sample(), b.sample());
    }
    println!("non-edge: {:?}", spec.stream_for(&g, 1, 3).unwrap_err());
}
