//! Difference-equation stepping against the state-space realization.

mod common;

use common::{inputs, max_discrepancy, random_stable_plant, TOL};
use hwconsensus::harness::reference_agents;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn reference_agents_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let agents = reference_agents();
    assert_eq!(agents.len(), 12);
    for (case, index, spec) in agents {
        let err = max_discrepancy(&spec.build(), &inputs(&mut rng));
        assert!(err < TOL, "case {case} agent {index}: {err:e}");
    }
}

#[test]
fn random_stable_systems_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..100 {
        let plant = random_stable_plant(&mut rng);
        assert!(plant.c().check_stability(1e-9).unwrap().stable);
        let err = max_discrepancy(&plant, &inputs(&mut rng));
        assert!(err < TOL, "trial {trial}: {err:e}");
    }
}
