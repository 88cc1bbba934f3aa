//! The three reference scenarios on the four-agent graph.
//!
//! All agents share the same four linear parts; Case 1 makes every agent a
//! Hammerstein system, Case 2 every agent a Wiener system, Case 3 agents 1–2
//! Wiener and 3–4 Hammerstein. Reset points are `u* = (1, 2, 3, 4)`,
//! `c_M = 55`, every initial value (including `u_{i,1}`) is zero and each of the
//! eight directed links carries independent standard normal noise.

use crate::graph::Topology;
use crate::noise::NoiseSpec;
use crate::nonlinearity::Nonlinearity;
use crate::plant::PlantKind;
use crate::polynomial::Polynomial;

use super::scenario::{AgentSpec, ControllerSpec, Scenario, ScenarioError};

pub const DEFAULT_HORIZON: u64 = 100_000;
pub const REFERENCE_C_M: f64 = 55.0;
pub const REFERENCE_U_STAR: [f64; 4] = [1.0, 2.0, 3.0, 4.0];

fn poly(c: &[f64]) -> Polynomial {
    Polynomial::new(c.to_vec()).expect("static coefficients")
}

/// `(C, D, f)` of reference agent `i` (0-based).
fn reference_agent(i: usize) -> (Polynomial, Polynomial, Nonlinearity) {
    match i {
        0 => (
            poly(&[1.0, 0.2, 0.0, 0.6]),
            poly(&[1.0, -0.3, -1.2]),
            Nonlinearity::CubicAffine {
                cubic: -1.0,
                linear: -1.0,
                offset: 0.0,
            },
        ),
        1 => (
            poly(&[1.0, 0.6, 0.5, 0.4]),
            poly(&[1.0, -1.0, -2.0]),
            Nonlinearity::Affine {
                slope: -2.0,
                offset: 1.0,
            },
        ),
        2 => (
            poly(&[1.0, -0.15, 0.0, 0.5]),
            poly(&[1.0, 0.2, -0.4]),
            Nonlinearity::ShiftedCube { shift: 1.0 },
        ),
        3 => (
            poly(&[1.0, 0.76, 0.5, 0.6]),
            poly(&[1.0, 0.5]),
            Nonlinearity::CubicAffine {
                cubic: 1.0,
                linear: 0.0,
                offset: 1.0,
            },
        ),
        _ => unreachable!("four reference agents"),
    }
}

fn kinds(case: u8) -> [PlantKind; 4] {
    use PlantKind::{Hammerstein as H, Wiener as W};
    match case {
        1 => [H, H, H, H],
        2 => [W, W, W, W],
        _ => [W, W, H, H],
    }
}

/// Built-in scenario `case ∈ {1, 2, 3}` with noise seed 0.
pub fn builtin_case(case: u8) -> Result<Scenario, ScenarioError> {
    if !(1..=3).contains(&case) {
        return Err(ScenarioError::Invalid(format!(
            "no built-in case {case}; expected 1, 2 or 3"
        )));
    }
    let agents = kinds(case)
        .iter()
        .enumerate()
        .map(|(i, &kind)| {
            let (c, d, f) = reference_agent(i);
            AgentSpec { kind, c, d, f }
        })
        .collect();
    Ok(Scenario {
        label: format!("case{case}"),
        horizon: DEFAULT_HORIZON,
        log_stride: 1,
        topology: Topology::four_agent_reference(),
        agents,
        controller: ControllerSpec {
            u_star: REFERENCE_U_STAR.to_vec(),
            c_m: REFERENCE_C_M,
            initial_u: Some(vec![0.0; 4]),
        },
        noise: NoiseSpec::gaussian(1.0, 0),
    })
}

/// All twelve `(case, agent)` reference configurations.
pub fn reference_agents() -> Vec<(u8, usize, AgentSpec)> {
    (1..=3u8)
        .flat_map(|case| {
            let s = builtin_case(case).expect("valid case");
            s.agents
                .into_iter()
                .enumerate()
                .map(move |(i, a)| (case, i, a))
        })
        .collect()
}

/// Two memoryless agents with `h = identity` on a single edge.
pub fn identity_pair() -> Scenario {
    let agent = AgentSpec {
        kind: PlantKind::Hammerstein,
        c: Polynomial::one(),
        d: Polynomial::one(),
        f: Nonlinearity::Identity,
    };
    Scenario {
        label: "identity-pair".into(),
        horizon: DEFAULT_HORIZON,
        log_stride: 1,
        topology: Topology::path(2).expect("two agents"),
        agents: vec![agent.clone(), agent],
        controller: ControllerSpec {
            u_star: vec![1.0, -1.0],
            c_m: 10.0,
            initial_u: Some(vec![2.0, -1.0]),
        },
        noise: NoiseSpec::zero(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_parameters() {
        let c1 = builtin_case(1).unwrap();
        let a = &c1.agents[0];
        assert_eq!(a.kind, PlantKind::Hammerstein);
        assert_eq!(a.c.coeffs(), &[1.0, 0.2, 0.0, 0.6]);
        assert_eq!(a.d.coeffs(), &[1.0, -0.3, -1.2]);
        assert_eq!(a.f.eval(1.0), -2.0);

        let c3 = builtin_case(3).unwrap();
        let a = &c3.agents[2];
        assert_eq!(a.kind, PlantKind::Hammerstein);
        assert_eq!(a.c.coeffs(), &[1.0, -0.15, 0.0, 0.5]);
        assert_eq!(a.d.coeffs(), &[1.0, 0.2, -0.4]);
        assert_eq!(a.f.eval(3.0), 8.0);
        assert_eq!(c3.agents[0].kind, PlantKind::Wiener);

        let c2 = builtin_case(2).unwrap();
        let a = &c2.agents[3];
        assert_eq!(a.kind, PlantKind::Wiener);
        assert_eq!(a.c.coeffs(), &[1.0, 0.76, 0.5, 0.6]);
        assert_eq!(a.d.coeffs(), &[1.0, 0.5]);
        assert_eq!(a.f.eval(2.0), 9.0);

        assert!(builtin_case(4).is_err());
        assert!(builtin_case(0).is_err());
    }

    #[test]
    fn all_cases_validate_strictly() {
        for case in 1..=3 {
            assert!(builtin_case(case).unwrap().validate(true).unwrap().is_empty());
        }
        assert!(identity_pair().validate(true).unwrap().is_empty());
        assert_eq!(reference_agents().len(), 12);
    }

    #[test]
    fn case_one_gains_at_zero() {
        let gains = builtin_case(1).unwrap().gains().unwrap();
        let h0: Vec<f64> = gains.iter().map(|g| g.h(0.0)).collect();
        let expected = [0.0, -0.8, -0.8 / 1.35, 1.5 / 2.86];
        for (a, b) in h0.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
