//! Helpers shared by the dynamics test and the acceptance target.
#![allow(dead_code)]

use hwconsensus::plant::{AgentPlant, StateSpacePlant};
use hwconsensus::polynomial::Polynomial;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const STEPS: usize = 1_000;
pub const TOL: f64 = 1e-10;

pub fn max_discrepancy(plant: &AgentPlant, inputs: &[f64]) -> f64 {
    let mut direct = plant.clone();
    let mut ss = StateSpacePlant::from_plant(plant);
    inputs
        .iter()
        .map(|&u| {
            let a = direct.step(u).unwrap();
            let b = ss.step(u);
            (a - b).abs() / a.abs().max(1.0)
        })
        .fold(0.0, f64::max)
}

pub fn inputs(rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..STEPS).map(|_| rng.gen_range(-2.0..2.0)).collect()
}

/// Monic-at-zero polynomial `Π (1 − z/ρ)` with every root outside the unit disk.
pub fn stable_polynomial(rng: &mut ChaCha8Rng, degree: usize) -> Polynomial {
    let mut coeffs = vec![1.0];
    let mut remaining = degree;
    while remaining > 0 {
        let r: f64 = rng.gen_range(1.1..4.0);
        if remaining >= 2 && rng.gen_bool(0.5) {
            // conjugate pair: (1 − 2cosθ/r z + z²/r²)
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::PI);
            coeffs = multiply(&coeffs, &[1.0, -2.0 * theta.cos() / r, 1.0 / (r * r)]);
            remaining -= 2;
        } else {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            coeffs = multiply(&coeffs, &[1.0, -sign / r]);
            remaining -= 1;
        }
    }
    Polynomial::new(coeffs).unwrap()
}

pub fn multiply(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Random stable plant of either kind with a cubic-affine map.
pub fn random_stable_plant(rng: &mut ChaCha8Rng) -> AgentPlant {
    use hwconsensus::nonlinearity::Nonlinearity;
    use hwconsensus::plant::PlantKind;
    let p = rng.gen_range(1..=5);
    let c = stable_polynomial(rng, p);
    let q = rng.gen_range(0..=4);
    let mut d = vec![1.0];
    d.extend((0..q).map(|_| rng.gen_range(-1.5..1.5)));
    let d = Polynomial::new(d).unwrap();
    let kind = if rng.gen_bool(0.5) { PlantKind::Hammerstein } else { PlantKind::Wiener };
    let f = Nonlinearity::CubicAffine {
        cubic: rng.gen_range(-1.0..1.0),
        linear: rng.gen_range(-2.0..2.0),
        offset: rng.gen_range(-1.0..1.0),
    };
    AgentPlant::new(kind, c, d, f)
}
