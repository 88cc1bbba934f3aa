//! A scenario from JSON: five agents on a ring with uniform noise, written to
//! disk, read back and verified.

use hwconsensus::analysis::verification_report;
use hwconsensus::harness::{read_run, run, write_run, Scenario};

const SCENARIO: &str = r#"{
    "label": "ring5",
    "horizon": 20000,
    "topology": [[1, 2, 1.0], [2, 3, 0.5], [3, 4, 1.0], [4, 5, 2.0], [5, 1, 1.0]],
    "agents": [
        {"kind": "H", "C": [1, 0.3], "D": [1, 0.5], "f": {"name": "cubic_affine", "params": [1, 1, 0]}},
        {"kind": "W", "C": [1, -0.4, 0.1], "D": [1], "f": {"name": "affine", "params": [2, -1]}},
        {"kind": "H", "C": [1], "D": [1, -0.2], "f": {"name": "shifted_cube", "params": [0.5]}},
        {"kind": "W", "C": [1, 0.5], "D": [1, 1], "f": {"name": "identity"}},
        {"kind": "H", "C": [1, 0.2, 0.2], "D": [1], "f": {"name": "polynomial", "params": [0, 1, 0, 0.2]}}
    ],
    "controller": {"u_star": [0.5, 0.5, 0.5, 0.5, 0.5], "c_M": 10},
    "noise": {"dist": "uniform", "params": [0.5], "seed": 11}
}"#;

fn main() {
    let scenario = Scenario::from_json(SCENARIO).unwrap();
    let warnings = scenario.validate(true).unwrap();
    println!("validated '{}' ({} warnings)", scenario.label, warnings.len());

    let result = run(&scenario, scenario.noise.master_seed).unwrap();
    println!("{:#?}", result.summary);

    let dir = std::env::temp_dir().join("hwconsensus-ring5");
    write_run(&dir, &scenario, &result).unwrap();
    let (stored, log) = read_run(&dir).unwrap();
    assert_eq!(log, result.log);
    let report = verification_report(&log, &stored.gains().unwrap(), &stored.topology).unwrap();
    println!(
        "read back from {}: centralized residual {:.2e}, lag ok {}, decomposition {:.2e}",
        dir.display(),
        report.centralized_residual,
        report.diameter_bound_ok,
        report.decomposition_max_err
    );
}
