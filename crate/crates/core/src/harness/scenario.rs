//! Scenario description, JSON schema and load-time validation.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::controller::Schedule;
use crate::graph::{GraphError, Topology};
use crate::noise::{NoiseDistribution, NoiseError, NoiseInjection, NoiseSpec};
use crate::nonlinearity::{Nonlinearity, NonlinearityError, NonlinearitySpec};
use crate::plant::{AgentPlant, PlantError, PlantKind, StaticGain};
use crate::polynomial::{Polynomial, PolynomialError};

/// Stability margin for the root check on `C(z)`.
pub const STABILITY_MARGIN: f64 = 1e-9;
/// Grid used to sample monotonicity of each static gain.
pub const MONOTONE_GRID: (f64, f64, usize) = (-50.0, 50.0, 10_000);

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Polynomial(#[from] PolynomialError),
    #[error(transparent)]
    Nonlinearity(#[from] NonlinearityError),
    #[error(transparent)]
    Plant(#[from] PlantError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error("validation failed: {0}")]
    Invalid(String),
}

/// One agent's plant description.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentSpec {
    pub kind: PlantKind,
    pub c: Polynomial,
    pub d: Polynomial,
    pub f: Nonlinearity,
}

impl AgentSpec {
    pub fn build(&self) -> AgentPlant {
        AgentPlant::new(self.kind, self.c.clone(), self.d.clone(), self.f.clone())
    }

    pub fn gain(&self) -> Result<StaticGain, PlantError> {
        StaticGain::new(self.kind, &self.c, &self.d, self.f.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerSpec {
    pub u_star: Vec<f64>,
    pub c_m: f64,
    /// `u_{i,1}`; `None` starts every agent at its reset point.
    pub initial_u: Option<Vec<f64>>,
}

impl ControllerSpec {
    pub fn schedule(&self) -> Schedule {
        Schedule::new(self.c_m)
    }

    pub fn initial(&self) -> Vec<f64> {
        self.initial_u.clone().unwrap_or_else(|| self.u_star.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub label: String,
    pub horizon: u64,
    pub log_stride: u64,
    pub topology: Topology,
    pub agents: Vec<AgentSpec>,
    pub controller: ControllerSpec,
    pub noise: NoiseSpec,
}

impl Scenario {
    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn gains(&self) -> Result<Vec<StaticGain>, PlantError> {
        self.agents.iter().map(AgentSpec::gain).collect()
    }

    pub fn schedule(&self) -> Schedule {
        self.controller.schedule()
    }

    /// Copy with the noise switched off (injections kept).
    pub fn noise_free(&self) -> Self {
        let mut s = self.clone();
        s.noise.distribution = NoiseDistribution::Zero;
        s
    }

    pub fn with_horizon(mut self, horizon: u64) -> Self {
        self.horizon = horizon;
        self
    }

    /// Structural checks always fail hard. Stability of `C` and monotonicity of
    /// `h` fail hard when `strict`; otherwise they come back as warnings.
    pub fn validate(&self, strict: bool) -> Result<Vec<String>, ScenarioError> {
        let n = self.topology.agent_count();
        let invalid = |msg: String| Err(ScenarioError::Invalid(msg));
        if self.agents.len() != n {
            return invalid(format!("{} agents for a {n}-agent topology", self.agents.len()));
        }
        if self.controller.u_star.len() != n {
            return invalid(format!("u_star has {} entries, expected {n}", self.controller.u_star.len()));
        }
        if let Some(init) = &self.controller.initial_u {
            if init.len() != n {
                return invalid(format!("initial_u has {} entries, expected {n}", init.len()));
            }
        }
        if self.horizon == 0 {
            return invalid("horizon must be at least 1".into());
        }
        if self.log_stride == 0 {
            return invalid("log_stride must be at least 1".into());
        }
        if !self.topology.is_connected() {
            return invalid("communication graph is disconnected".into());
        }
        if !(self.controller.c_m > 0.0) || !self.controller.c_m.is_finite() {
            return invalid(format!("c_M = {} must be positive", self.controller.c_m));
        }
        let m0 = self.schedule().initial_bound();
        for (i, &u) in self.controller.u_star.iter().enumerate() {
            if !(u.abs() < m0) {
                return invalid(format!(
                    "|u*_{}| = {} is not below ln(c_M) = {m0:.6}",
                    i + 1,
                    u.abs()
                ));
            }
        }
        for (i, &u) in self.controller.initial().iter().enumerate() {
            if !(u.abs() < m0) {
                return invalid(format!(
                    "|u_{},1| = {} is not below ln(c_M) = {m0:.6}",
                    i + 1,
                    u.abs()
                ));
            }
        }
        self.noise.distribution.validate()?;
        for inj in &self.noise.injections {
            self.noise.stream_for(&self.topology, inj.observer, inj.observed)?;
        }

        let mut warnings = Vec::new();
        for (i, agent) in self.agents.iter().enumerate() {
            let report = agent.c.check_stability(STABILITY_MARGIN)?;
            if !report.stable {
                warnings.push(format!(
                    "agent {}: C(z) has a root with |z| = {:.6} inside or near the unit disk",
                    i + 1,
                    report.min_root_modulus().unwrap_or(f64::NAN)
                ));
            }
            let gain = agent.gain()?;
            let (lo, hi, points) = MONOTONE_GRID;
            if !gain.is_increasing_on_grid(lo, hi, points) {
                warnings.push(format!(
                    "agent {}: static gain is not strictly increasing on [{lo}, {hi}]",
                    i + 1
                ));
            }
        }
        if strict && !warnings.is_empty() {
            return Err(ScenarioError::Invalid(warnings.join("; ")));
        }
        for w in &warnings {
            log::warn!("{}: {w}", self.label);
        }
        Ok(warnings)
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        file.into_scenario()
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_file(&self) -> ScenarioFile {
        let (dist, params) = match self.noise.distribution {
            NoiseDistribution::Zero => ("zero", vec![]),
            NoiseDistribution::Gaussian { variance } => ("gaussian", vec![variance]),
            NoiseDistribution::Uniform { half_width } => ("uniform", vec![half_width]),
        };
        ScenarioFile {
            label: self.label.clone(),
            horizon: self.horizon,
            log_stride: self.log_stride,
            topology: self.topology.weighted_edges(),
            agents: self
                .agents
                .iter()
                .map(|a| AgentFile {
                    kind: a.kind,
                    c: a.c.clone(),
                    d: a.d.clone(),
                    f: a.f.to_spec(),
                })
                .collect(),
            controller: ControllerFile {
                u_star: self.controller.u_star.clone(),
                c_m: self.controller.c_m,
                initial_u: self.controller.initial_u.clone(),
            },
            noise: NoiseFile {
                dist: dist.to_string(),
                params,
                seed: self.noise.master_seed,
                injections: self.noise.injections.clone(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("scenario serializes")
    }

    /// FNV-1a hash of the canonical JSON form.
    pub fn content_hash(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in serde_json::to_string(&self.to_file()).expect("scenario serializes").bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }
}

/// On-disk scenario document. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub label: String,
    pub horizon: u64,
    #[serde(default = "one")]
    pub log_stride: u64,
    /// `[i, j, weight]` triples, 1-based.
    pub topology: Vec<(usize, usize, f64)>,
    pub agents: Vec<AgentFile>,
    pub controller: ControllerFile,
    pub noise: NoiseFile,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentFile {
    pub kind: PlantKind,
    #[serde(rename = "C")]
    pub c: Polynomial,
    #[serde(rename = "D")]
    pub d: Polynomial,
    pub f: NonlinearitySpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerFile {
    pub u_star: Vec<f64>,
    #[serde(rename = "c_M")]
    pub c_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_u: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseFile {
    /// `zero`, `gaussian` (params: `[variance]`) or `uniform` (params: `[half_width]`).
    pub dist: String,
    #[serde(default)]
    pub params: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub injections: Vec<NoiseInjection>,
}

impl NoiseFile {
    fn distribution(&self) -> Result<NoiseDistribution, ScenarioError> {
        let bad = || {
            ScenarioError::Invalid(format!(
                "noise `{}` with params {:?}",
                self.dist, self.params
            ))
        };
        match (self.dist.as_str(), self.params.as_slice()) {
            ("zero", []) => Ok(NoiseDistribution::Zero),
            ("gaussian", [variance]) => Ok(NoiseDistribution::Gaussian { variance: *variance }),
            ("uniform", [half_width]) => Ok(NoiseDistribution::Uniform {
                half_width: *half_width,
            }),
            _ => Err(bad()),
        }
    }
}

impl ScenarioFile {
    pub fn into_scenario(self) -> Result<Scenario, ScenarioError> {
        let n = self.agents.len();
        let topology = Topology::new(n, &self.topology)?;
        let agents = self
            .agents
            .into_iter()
            .map(|a| {
                Ok(AgentSpec {
                    kind: a.kind,
                    c: a.c,
                    d: a.d,
                    f: Nonlinearity::from_spec(&a.f)?,
                })
            })
            .collect::<Result<Vec<_>, ScenarioError>>()?;
        let noise = NoiseSpec {
            distribution: self.noise.distribution()?,
            master_seed: self.noise.seed,
            injections: self.noise.injections.clone(),
        };
        Ok(Scenario {
            label: self.label,
            horizon: self.horizon,
            log_stride: self.log_stride,
            topology,
            agents,
            controller: ControllerSpec {
                u_star: self.controller.u_star,
                c_m: self.controller.c_m,
                initial_u: self.controller.initial_u,
            },
            noise,
        })
    }
}
