//! Scenario description, built-in reference cases, the simulation loop and
//! the on-disk log format.

pub mod builtin;
pub mod log;
pub mod scenario;
pub mod sim;

pub use builtin::{builtin_case, identity_pair, reference_agents};
pub use log::{AgentRecord, EdgeRecord, LogError, TrajectoryLog};
pub use scenario::{AgentSpec, ControllerSpec, Scenario, ScenarioError};
pub use sim::{batch, read_run, run, write_run, RunResult, RunSummary, SimError};
