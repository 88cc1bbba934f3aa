//! Observation noise `ε_{ij,k+1}` on each directed link, one independent stream
//! per ordered (observer, observed) pair.
//!
//! Stream seeding: `splitmix64(master_seed ^ splitmix64((i << 32) | j))` with
//! 1-based `i` (observer) and `j` (observed) seeds a ChaCha8 generator.
//! Uniforms take the top 53 bits of each `u64`. Gaussians use the Marsaglia
//! polar method on two uniforms in `(-1, 1)`, returning both variates of each
//! accepted pair in order.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Topology;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("agent {observer} does not observe agent {observed}")]
    NotAnEdge { observer: usize, observed: usize },
    #[error("invalid noise parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseDistribution {
    Zero,
    /// Zero-mean normal with the given variance.
    Gaussian { variance: f64 },
    /// Uniform on `(-half_width, half_width)`.
    Uniform { half_width: f64 },
}

impl NoiseDistribution {
    pub fn validate(&self) -> Result<(), NoiseError> {
        match *self {
            Self::Zero => Ok(()),
            Self::Gaussian { variance } if variance >= 0.0 && variance.is_finite() => Ok(()),
            Self::Uniform { half_width } if half_width >= 0.0 && half_width.is_finite() => Ok(()),
            other => Err(NoiseError::InvalidParams(format!("{other:?}"))),
        }
    }
}

/// Deterministic additive term placed on one sample of one stream.
///
/// `step` is the algorithm step `k` whose observation `z_{ij,k+1}` receives
/// `value` on top of the random draw. Agents are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseInjection {
    pub step: u64,
    pub observer: usize,
    pub observed: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    pub distribution: NoiseDistribution,
    pub master_seed: u64,
    pub injections: Vec<NoiseInjection>,
}

impl NoiseSpec {
    pub fn gaussian(variance: f64, master_seed: u64) -> Self {
        Self {
            distribution: NoiseDistribution::Gaussian { variance },
            master_seed,
            injections: Vec::new(),
        }
    }

    pub fn zero() -> Self {
        Self {
            distribution: NoiseDistribution::Zero,
            master_seed: 0,
            injections: Vec::new(),
        }
    }

    /// Stream for observer `i` watching neighbor `j` (both 1-based).
    pub fn stream_for(
        &self,
        topology: &Topology,
        observer: usize,
        observed: usize,
    ) -> Result<EdgeStream, NoiseError> {
        let n = topology.agent_count();
        let in_range = |a: usize| (1..=n).contains(&a);
        if !in_range(observer) || !in_range(observed) || !topology.is_edge(observer - 1, observed - 1)
        {
            return Err(NoiseError::NotAnEdge { observer, observed });
        }
        Ok(EdgeStream::new(self, observer, observed))
    }
}

/// splitmix64 output function.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed for the stream of the ordered pair `(observer, observed)`, 1-based.
pub fn stream_seed(master_seed: u64, observer: usize, observed: usize) -> u64 {
    let pair = ((observer as u64) << 32) | (observed as u64 & 0xFFFF_FFFF);
    splitmix64(master_seed ^ splitmix64(pair))
}

#[derive(Debug, Clone)]
pub struct EdgeStream {
    observer: usize,
    observed: usize,
    distribution: NoiseDistribution,
    rng: ChaCha8Rng,
    spare: Option<f64>,
    /// Step `k` of the next sample (it becomes `ε_{ij,k+1}`).
    next_step: u64,
    injections: Vec<(u64, f64)>,
}

impl EdgeStream {
    fn new(spec: &NoiseSpec, observer: usize, observed: usize) -> Self {
        let injections = spec
            .injections
            .iter()
            .filter(|inj| inj.observer == observer && inj.observed == observed)
            .map(|inj| (inj.step, inj.value))
            .collect();
        Self {
            observer,
            observed,
            distribution: spec.distribution,
            rng: ChaCha8Rng::seed_from_u64(stream_seed(spec.master_seed, observer, observed)),
            spare: None,
            next_step: 1,
            injections,
        }
    }

    /// `(observer, observed)`, 1-based.
    pub fn pair(&self) -> (usize, usize) {
        (self.observer, self.observed)
    }

    /// Number of samples drawn so far.
    pub fn drawn(&self) -> u64 {
        self.next_step - 1
    }

    pub fn sample(&mut self) -> f64 {
        let step = self.next_step;
        self.next_step += 1;
        let base = match self.distribution {
            NoiseDistribution::Zero => 0.0,
            NoiseDistribution::Gaussian { variance } => variance.sqrt() * self.standard_normal(),
            NoiseDistribution::Uniform { half_width } => half_width * self.symmetric_uniform(),
        };
        let extra: f64 = self
            .injections
            .iter()
            .filter(|&&(s, _)| s == step)
            .map(|&(_, v)| v)
            .sum();
        base + extra
    }

    /// Uniform on `[-1, 1)` with 53-bit resolution.
    fn symmetric_uniform(&mut self) -> f64 {
        let unit = (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        2.0 * unit - 1.0
    }

    fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let a = self.symmetric_uniform();
            let b = self.symmetric_uniform();
            let s = a * a + b * b;
            if s > 0.0 && s < 1.0 {
                let factor = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(b * factor);
                return a * factor;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn draws(s: &mut EdgeStream, n: usize) -> Vec<f64> {
        (0..n).map(|_| s.sample()).collect()
    }

    #[test]
    fn opposite_directions_differ() {
        let t = Topology::four_agent_reference();
        let spec = NoiseSpec::gaussian(1.0, 42);
        let a = draws(&mut spec.stream_for(&t, 1, 2).unwrap(), 16);
        let b = draws(&mut spec.stream_for(&t, 2, 1).unwrap(), 16);
        assert_ne!(a, b);
    }

    #[test]
    fn replay_is_identical() {
        let t = Topology::four_agent_reference();
        let spec = NoiseSpec::gaussian(1.0, 7);
        let a = draws(&mut spec.stream_for(&t, 2, 4).unwrap(), 1000);
        let b = draws(&mut spec.stream_for(&t, 2, 4).unwrap(), 1000);
        assert_eq!(a, b);
    }

    #[test]
    fn zero_stream() {
        let t = Topology::four_agent_reference();
        let mut s = NoiseSpec::zero().stream_for(&t, 3, 2).unwrap();
        assert!(draws(&mut s, 100).iter().all(|&x| x == 0.0));
        assert_eq!(s.drawn(), 100);
    }

    #[test]
    fn non_edges_are_rejected() {
        let t = Topology::four_agent_reference();
        let spec = NoiseSpec::zero();
        assert_eq!(
            spec.stream_for(&t, 1, 3).unwrap_err(),
            NoiseError::NotAnEdge {
                observer: 1,
                observed: 3
            }
        );
        assert!(spec.stream_for(&t, 1, 1).is_err());
        assert!(spec.stream_for(&t, 0, 1).is_err());
        assert!(spec.stream_for(&t, 5, 1).is_err());
    }

    #[test]
    fn injection_lands_on_requested_step() {
        let t = Topology::four_agent_reference();
        let mut spec = NoiseSpec::zero();
        spec.injections.push(NoiseInjection {
            step: 3,
            observer: 2,
            observed: 1,
            value: 50.0,
        });
        let mut s = spec.stream_for(&t, 2, 1).unwrap();
        assert_eq!(draws(&mut s, 4), vec![0.0, 0.0, 50.0, 0.0]);
        let mut other = spec.stream_for(&t, 1, 2).unwrap();
        assert!(draws(&mut other, 4).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn gaussian_moments() {
        let t = Topology::four_agent_reference();
        let mut s = NoiseSpec::gaussian(1.0, 2024).stream_for(&t, 1, 4).unwrap();
        let n = 1_000_000;
        let xs = draws(&mut s, n);
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!(var > 0.99 && var < 1.01, "variance {var}");
    }

    #[test]
    fn uniform_range_and_variance() {
        let t = Topology::four_agent_reference();
        let spec = NoiseSpec {
            distribution: NoiseDistribution::Uniform { half_width: 2.0 },
            master_seed: 5,
            injections: vec![],
        };
        let xs = draws(&mut spec.stream_for(&t, 4, 1).unwrap(), 200_000);
        assert!(xs.iter().all(|x| x.abs() <= 2.0));
        let var = xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64;
        assert!((var - 4.0 / 3.0).abs() < 0.02);
    }

    #[test]
    fn streams_are_uncorrelated() {
        let t = Topology::four_agent_reference();
        let spec = NoiseSpec::gaussian(1.0, 11);
        let pairs = t.directed_pairs();
        let n = 100_000;
        let series: Vec<Vec<f64>> = pairs
            .iter()
            .map(|&(i, j)| draws(&mut spec.stream_for(&t, i + 1, j + 1).unwrap(), n))
            .collect();
        for a in 0..series.len() {
            for b in (a + 1)..series.len() {
                let c: f64 = series[a].iter().zip(&series[b]).map(|(x, y)| x * y).sum::<f64>()
                    / n as f64;
                assert!(c.abs() < 0.02, "pair {a},{b}: {c}");
            }
        }
    }

    #[test]
    fn weighted_partial_sums_stay_bounded() {
        let t = Topology::four_agent_reference();
        let mut s = NoiseSpec::gaussian(1.0, 3).stream_for(&t, 2, 3).unwrap();
        let mut partial = 0.0f64;
        let mut worst = 0.0f64;
        for k in 1..=1_000_000u64 {
            partial += s.sample() / k as f64;
            worst = worst.max(partial.abs());
        }
        log::debug!("max |Σ ε/k| = {worst}");
        assert!(worst < 50.0);
    }

    #[test]
    fn invalid_parameters() {
        assert!(NoiseDistribution::Gaussian { variance: -1.0 }.validate().is_err());
        assert!(NoiseDistribution::Uniform { half_width: f64::NAN }.validate().is_err());
        assert!(NoiseDistribution::Zero.validate().is_ok());
    }
}
