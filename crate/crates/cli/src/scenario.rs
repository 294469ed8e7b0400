//! Scenario files (JSON) and the built-in reference cases.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use armform::control::ActuationMode;
use armform::dynamics::ManipulatorParams;
use armform::kinematics::BasePose;
use armform::sim::{Agent, Network, SimConfig};
use armform::{FormationSpec, Gains, JointState};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// On-disk scenario document. `schema_version` is checked on load so the
/// format can evolve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub agents: Vec<AgentSpec>,
    pub graph: GraphSpec,
    pub gains: GainsSpec,
    #[serde(default)]
    pub sim: SimSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub mode: Mode,
    pub params: ParamsSpec,
    pub base: [f64; 2],
    pub q0: [f64; 2],
    pub qdot0: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Fa,
    Pa,
}

impl From<Mode> for ActuationMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Fa => ActuationMode::FullyActuated,
            Mode::Pa => ActuationMode::PassiveActive,
        }
    }
}

/// Physical constants, keyed like the usual two-link symbol table
/// (masses m, COM inertias I, link lengths L, joint-to-COM distances l).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub m1: f64,
    pub m2: f64,
    #[serde(rename = "I1")]
    pub i1: f64,
    #[serde(rename = "I2")]
    pub i2: f64,
    #[serde(rename = "L1")]
    pub len1: f64,
    #[serde(rename = "L2")]
    pub len2: f64,
    #[serde(rename = "l1")]
    pub com1: f64,
    #[serde(rename = "l2")]
    pub com2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    /// Ordered edges, 1-based vertex indices (tail, head).
    pub edges: Vec<[usize; 2]>,
    pub d_star: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsSpec {
    pub kp: f64,
    pub kd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSpec {
    pub dt: f64,
    pub t_final: f64,
    pub log_stride: usize,
}

impl Default for SimSpec {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_final: 30.0,
            log_stride: 1,
        }
    }
}

impl ScenarioFile {
    /// Build the runnable network and config, with field-level diagnostics.
    pub fn to_simulation(&self) -> Result<(Network, SimConfig), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Scenario(format!(
                "schema_version {} not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.agents.is_empty() {
            return Err(CliError::Scenario(
                "agents: at least one agent required".into(),
            ));
        }
        let mut agents = Vec::with_capacity(self.agents.len());
        for (idx, spec) in self.agents.iter().enumerate() {
            let label = idx + 1;
            let p = spec.params;
            let params =
                ManipulatorParams::new(p.m1, p.m2, p.i1, p.i2, p.len1, p.len2, p.com1, p.com2)
                    .map_err(|e| CliError::Scenario(format!("agents[{label}].params: {e}")))?;
            let state = JointState::new(spec.q0[0], spec.q0[1], spec.qdot0[0], spec.qdot0[1]);
            if !state.is_finite() {
                return Err(CliError::Scenario(format!(
                    "agents[{label}]: q0/qdot0 must be finite"
                )));
            }
            let base = BasePose::from(spec.base);
            let agent = match spec.mode {
                Mode::Fa => Agent::fully_actuated(params, base, state)
                    .map_err(|e| CliError::Scenario(format!("agents[{label}]: {e}")))?,
                Mode::Pa => {
                    if spec.qdot0 != [0.0, 0.0] {
                        return Err(CliError::Scenario(format!(
                            "agents[{label}].qdot0: a pa manipulator must start stationary \
                             (qdot0 = [0, 0]), got [{}, {}]",
                            spec.qdot0[0], spec.qdot0[1]
                        )));
                    }
                    if spec.q0[1].abs() > PI {
                        return Err(CliError::Scenario(format!(
                            "agents[{label}].q0[1]: a pa manipulator must start with its \
                             actuated angle in [-pi, pi], got {}",
                            spec.q0[1]
                        )));
                    }
                    Agent::passive_active(params, base, state)
                        .map_err(|e| CliError::Scenario(format!("agents[{label}]: {e}")))?
                }
            };
            agents.push(agent);
        }

        let edges: Vec<(usize, usize)> = self.graph.edges.iter().map(|&[t, h]| (t, h)).collect();
        let formation = FormationSpec::new(self.agents.len(), edges, self.graph.d_star.clone())
            .map_err(|e| CliError::Scenario(format!("graph: {e}")))?;
        let network =
            Network::new(agents, formation).map_err(|e| CliError::Scenario(e.to_string()))?;

        let gains = Gains::new(self.gains.kp, self.gains.kd)
            .map_err(|e| CliError::Scenario(format!("gains: {e}")))?;
        let config = SimConfig {
            dt: self.sim.dt,
            t_final: self.sim.t_final,
            gains,
            monitors: Default::default(),
            log_stride: self.sim.log_stride,
        };
        config
            .validate()
            .map_err(|e| CliError::Scenario(format!("sim: {e}")))?;
        Ok((network, config))
    }

    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn n_edges(&self) -> usize {
        self.graph.edges.len()
    }
}

/// Load and validate a scenario document.
pub fn load_scenario(path: &Path) -> Result<ScenarioFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    let scenario: ScenarioFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Scenario(format!("{}: {e}", path.display())))?;
    // Surface semantic problems at load time, not at run time.
    scenario.to_simulation()?;
    Ok(scenario)
}

/// The three reference cases: a four-arm network forming a 0.4 m square
/// (four sides plus one diagonal), identical arms, gains kp=800, kd=600.
/// They differ in which arms are passive-active: case1 = arm 4, case2 =
/// arms 3-4, case3 = arms 2-4. case3 converges much more slowly (one
/// actuated joint on three of the four arms), hence its longer horizon.
pub fn builtin_case(name: &str) -> Result<ScenarioFile, CliError> {
    let pa_agents: &[usize] = match name {
        "case1" => &[4],
        "case2" => &[3, 4],
        "case3" => &[2, 3, 4],
        _ => {
            return Err(CliError::Usage(format!(
                "unknown case {name:?}; available: case1, case2, case3"
            )))
        }
    };
    // case3 runs four times longer; the finer step keeps the secular
    // integration drift of the PA momentum constraint well under its bound.
    let (dt, t_final) = if name == "case3" {
        (5e-4, 120.0)
    } else {
        (1e-3, 30.0)
    };

    let params = ParamsSpec {
        m1: 1.2,
        m2: 1.0,
        i1: 0.2250,
        i2: 0.1875,
        len1: 1.5,
        len2: 1.5,
        com1: 0.75,
        com2: 0.75,
    };
    let bases = [[0.0, 0.0], [5.0, 0.0], [5.0, 3.0], [0.0, 3.0]];
    let q0s = [
        [-PI / 2.0, PI / 3.0],
        [PI / 6.0, PI / 3.0],
        [PI / 2.0, PI / 3.0],
        [-PI / 2.0, -PI / 3.0],
    ];
    let agents = (0..4)
        .map(|i| AgentSpec {
            mode: if pa_agents.contains(&(i + 1)) {
                Mode::Pa
            } else {
                Mode::Fa
            },
            params,
            base: bases[i],
            q0: q0s[i],
            qdot0: [0.0, 0.0],
        })
        .collect();

    let side = 0.4;
    Ok(ScenarioFile {
        schema_version: SCHEMA_VERSION,
        agents,
        graph: GraphSpec {
            edges: vec![[1, 2], [2, 3], [3, 4], [4, 1], [1, 3]],
            d_star: vec![side, side, side, side, side * 2f64.sqrt()],
        },
        gains: GainsSpec {
            kp: 800.0,
            kd: 600.0,
        },
        sim: SimSpec {
            dt,
            t_final,
            log_stride: 1,
        },
    })
}
