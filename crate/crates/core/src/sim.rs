//! Fixed-step closed-loop simulation of the manipulator network with
//! per-step verification monitors and trajectory logging.
//!
//! The plant is the stacked Euler-Lagrange system, the feedback is the
//! distributed formation law, and the integrator is classical RK4 with the
//! control law evaluated at every stage (so the integrated system is the
//! continuous closed loop). Monitors record, per logged sample: the
//! Lyapunov certificate, the stacked actuated-velocity norm, per-agent
//! Jacobian margins (|det J| for fully-actuated arms, |Jbar1 Jbar2| for
//! passive-active ones), and for PA arms the holonomy drift |q1 - f(q2)|
//! and the conserved-momentum residual |M11 q1dot + M12 q2dot|.

use nalgebra::Vector2;

use crate::control::{control_fa, control_pa, ActuationMode, Gains};
use crate::dynamics::{AlphaParams, ControlTorque, JointState, ManipulatorParams};
use crate::error::{Error, Result};
use crate::formation::{EdgeState, FormationSpec};
use crate::kinematics::{
    augmented_jacobian, fk, jacobian, reduced_jacobian, BasePose, HolonomicBranch,
};

/// Relative slack allowed per logged step in the Lyapunov monotonicity
/// monitor: `U(n+1) <= U(n) + U_SLACK_REL * (1 + U(n))`.
pub const U_SLACK_REL: f64 = 1e-6;
/// Bound on |q1 - f(q2)| along any PA trajectory started at rest.
pub const HOLONOMY_DRIFT_TOL: f64 = 1e-4;
/// Bound on the conserved-momentum residual |M11 q1dot + M12 q2dot|.
pub const MOMENTUM_RESIDUAL_TOL: f64 = 1e-4;
/// A run is flagged when a Jacobian margin drops below this.
pub const JACOBIAN_MARGIN_MIN: f64 = 1e-6;
/// Terminal stacked actuated-velocity bound for a converged run.
pub const TERMINAL_XI_TOL: f64 = 1e-3;

/// One arm of the network: physical constants, base pose, actuation mode,
/// current joint state, and (for PA arms) the holonomic branch fixed by the
/// initial configuration.
#[derive(Debug, Clone)]
pub struct Agent {
    mode: ActuationMode,
    params: ManipulatorParams,
    alpha: AlphaParams,
    base: BasePose,
    state: JointState,
    branch: Option<HolonomicBranch>,
}

impl Agent {
    pub fn fully_actuated(
        params: ManipulatorParams,
        base: BasePose,
        state: JointState,
    ) -> Result<Self> {
        if !state.is_finite() {
            return Err(Error::NonFinite("initial joint state"));
        }
        let alpha = params.alphas();
        Ok(Self {
            mode: ActuationMode::FullyActuated,
            params,
            alpha,
            base,
            state,
            branch: None,
        })
    }

    /// A passive-active arm must start at rest with its actuated angle in
    /// [-pi, pi]; the holonomic branch is fixed here, once.
    pub fn passive_active(
        params: ManipulatorParams,
        base: BasePose,
        state: JointState,
    ) -> Result<Self> {
        let alpha = params.alphas();
        let branch = HolonomicBranch::new(&alpha, &state)?;
        Ok(Self {
            mode: ActuationMode::PassiveActive,
            params,
            alpha,
            base,
            state,
            branch: Some(branch),
        })
    }

    pub fn mode(&self) -> ActuationMode {
        self.mode
    }
    pub fn params(&self) -> &ManipulatorParams {
        &self.params
    }
    pub fn alpha(&self) -> &AlphaParams {
        &self.alpha
    }
    pub fn base(&self) -> &BasePose {
        &self.base
    }
    pub fn state(&self) -> &JointState {
        &self.state
    }
    pub fn branch(&self) -> Option<&HolonomicBranch> {
        self.branch.as_ref()
    }

    pub fn end_effector(&self) -> Vector2<f64> {
        fk(&self.params, &self.state.q, &self.base)
    }

    /// |det J| for FA arms, |Jbar1 Jbar2| for PA arms (assumption margin).
    pub fn jacobian_margin(&self) -> f64 {
        match self.mode {
            ActuationMode::FullyActuated => {
                jacobian(&self.params, &self.state.q).determinant().abs()
            }
            ActuationMode::PassiveActive => {
                let jb = reduced_jacobian(&self.alpha, &self.params, &self.state.q);
                (jb[0] * jb[1]).abs()
            }
        }
    }
}

/// The networked plant: agents plus the formation graph over them.
#[derive(Debug, Clone)]
pub struct Network {
    agents: Vec<Agent>,
    formation: FormationSpec,
}

impl Network {
    pub fn new(agents: Vec<Agent>, formation: FormationSpec) -> Result<Self> {
        if agents.len() != formation.n_agents() {
            return Err(Error::Scenario(format!(
                "{} agents declared but formation graph is over {}",
                agents.len(),
                formation.n_agents()
            )));
        }
        Ok(Self { agents, formation })
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }
    pub fn agent(&self, i: usize) -> &Agent {
        &self.agents[i]
    }
    pub fn formation(&self) -> &FormationSpec {
        &self.formation
    }
    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn positions(&self) -> Vec<Vector2<f64>> {
        self.agents.iter().map(Agent::end_effector).collect()
    }

    /// Control torques at the current state, with the edge state and the
    /// per-agent potential gradient that produced them.
    pub fn torques(&self, gains: &Gains) -> (Vec<ControlTorque>, EdgeState, Vec<Vector2<f64>>) {
        let states: Vec<JointState> = self.agents.iter().map(|a| a.state).collect();
        let (u, es, ehat) = torques_at(&self.agents, &states, &self.formation, gains);
        (u, es, ehat)
    }

    pub fn kinetic_energy(&self) -> f64 {
        self.agents
            .iter()
            .map(|a| a.alpha.kinetic_energy(&a.state))
            .sum()
    }

    /// Stacked actuated joint velocities, in agent order (two entries per FA
    /// arm, one per PA arm).
    pub fn xi(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for a in &self.agents {
            match a.mode {
                ActuationMode::FullyActuated => out.extend([a.state.qdot[0], a.state.qdot[1]]),
                ActuationMode::PassiveActive => out.push(a.state.qdot[1]),
            }
        }
        out
    }

    pub fn xi_norm(&self) -> f64 {
        self.xi().iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Per-agent stationarity residuals: `|J^T ehat|` (FA), `|Jstar ehat|`
    /// (PA); all tend to zero as the formation converges.
    pub fn stationarity_residuals(&self, gains: &Gains) -> Vec<f64> {
        let (_, _, ehat) = self.torques(gains);
        self.agents
            .iter()
            .zip(&ehat)
            .map(|(a, eh)| match a.mode {
                ActuationMode::FullyActuated => {
                    crate::control::fa_stationarity_residual(&jacobian(&a.params, &a.state.q), eh)
                }
                ActuationMode::PassiveActive => crate::control::pa_stationarity_residual(
                    &augmented_jacobian(&a.alpha, &a.params, &a.state.q),
                    eh,
                ),
            })
            .collect()
    }

    fn set_states(&mut self, states: &[JointState]) {
        for (a, s) in self.agents.iter_mut().zip(states) {
            a.state = *s;
        }
    }
}

fn torques_at(
    agents: &[Agent],
    states: &[JointState],
    formation: &FormationSpec,
    gains: &Gains,
) -> (Vec<ControlTorque>, EdgeState, Vec<Vector2<f64>>) {
    let x: Vec<Vector2<f64>> = agents
        .iter()
        .zip(states)
        .map(|(a, s)| fk(&a.params, &s.q, &a.base))
        .collect();
    let es = formation.edge_state(&x);
    let ehat = formation.gradient_from_edges(&es);
    let u = agents
        .iter()
        .zip(states)
        .zip(&ehat)
        .map(|((a, s), eh)| match a.mode {
            ActuationMode::FullyActuated => {
                control_fa(gains, &jacobian(&a.params, &s.q), eh, &s.qdot)
            }
            ActuationMode::PassiveActive => control_pa(
                gains,
                &reduced_jacobian(&a.alpha, &a.params, &s.q),
                eh,
                s.qdot[1],
            ),
        })
        .collect();
    (u, es, ehat)
}

/// Closed-loop derivative (qdot, qddot) for every agent at the given states.
fn derivatives(
    agents: &[Agent],
    states: &[JointState],
    formation: &FormationSpec,
    gains: &Gains,
    t_report: f64,
) -> Result<Vec<(Vector2<f64>, Vector2<f64>)>> {
    let (u, _, _) = torques_at(agents, states, formation, gains);
    agents
        .iter()
        .zip(states)
        .zip(&u)
        .enumerate()
        .map(|(i, ((a, s), ui))| {
            let qdd = a
                .alpha
                .forward_dynamics(s, ui)
                .map_err(|_| Error::Divergence {
                    agent: i,
                    t: t_report,
                })?;
            Ok((s.qdot, qdd))
        })
        .collect()
}

fn rk4_combine(
    base: &[JointState],
    k: &[(Vector2<f64>, Vector2<f64>)],
    scale: f64,
) -> Vec<JointState> {
    base.iter()
        .zip(k)
        .map(|(s, (dq, dv))| JointState {
            q: s.q + scale * dq,
            qdot: s.qdot + scale * dv,
        })
        .collect()
}

/// Advance the network by one RK4 step of length `dt`. `t_now` is only used
/// to label divergence diagnostics.
pub fn step(network: &mut Network, gains: &Gains, dt: f64, t_now: f64) -> Result<()> {
    let y0: Vec<JointState> = network.agents.iter().map(|a| a.state).collect();
    let t_next = t_now + dt;
    let k1 = derivatives(&network.agents, &y0, &network.formation, gains, t_next)?;
    let y1 = rk4_combine(&y0, &k1, 0.5 * dt);
    let k2 = derivatives(&network.agents, &y1, &network.formation, gains, t_next)?;
    let y2 = rk4_combine(&y0, &k2, 0.5 * dt);
    let k3 = derivatives(&network.agents, &y2, &network.formation, gains, t_next)?;
    let y3 = rk4_combine(&y0, &k3, dt);
    let k4 = derivatives(&network.agents, &y3, &network.formation, gains, t_next)?;

    let sixth = dt / 6.0;
    let next: Vec<JointState> = y0
        .iter()
        .enumerate()
        .map(|(i, s)| JointState {
            q: s.q + sixth * (k1[i].0 + 2.0 * k2[i].0 + 2.0 * k3[i].0 + k4[i].0),
            qdot: s.qdot + sixth * (k1[i].1 + 2.0 * k2[i].1 + 2.0 * k3[i].1 + k4[i].1),
        })
        .collect();

    for (i, s) in next.iter().enumerate() {
        if !s.is_finite() {
            return Err(Error::Divergence {
                agent: i,
                t: t_next,
            });
        }
    }
    network.set_states(&next);
    Ok(())
}

/// Which per-sample monitor series to record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonitorFlags {
    pub holonomy: bool,
    pub margins: bool,
    pub u_monotonicity: bool,
}

impl Default for MonitorFlags {
    fn default() -> Self {
        Self {
            holonomy: true,
            margins: true,
            u_monotonicity: true,
        }
    }
}

/// Fixed-step simulation configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub t_final: f64,
    pub gains: Gains,
    pub monitors: MonitorFlags,
    pub log_stride: usize,
}

impl SimConfig {
    /// Defaults: dt = 1e-3 s, horizon 30 s, every step logged.
    pub fn new(gains: Gains) -> Self {
        Self {
            dt: 1e-3,
            t_final: 30.0,
            gains,
            monitors: MonitorFlags::default(),
            log_stride: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_final.is_finite() && self.t_final >= self.dt) {
            return Err(Error::InvalidConfig(format!(
                "t_final = {} must be at least dt = {}",
                self.t_final, self.dt
            )));
        }
        if self.log_stride == 0 {
            return Err(Error::InvalidConfig("log_stride must be >= 1".into()));
        }
        Ok(())
    }
}

/// Per-agent logged series (sample-indexed, all the same length).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AgentTrack {
    pub q1: Vec<f64>,
    pub q2: Vec<f64>,
    pub dq1: Vec<f64>,
    pub dq2: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    /// |det J| (FA) or |Jbar1 Jbar2| (PA); empty when margins are disabled.
    pub jac_margin: Vec<f64>,
    /// |q1 - f(q2)|, PA arms only.
    pub holonomy_drift: Option<Vec<f64>>,
    /// |M11 q1dot + M12 q2dot|, PA arms only.
    pub momentum_residual: Option<Vec<f64>>,
}

/// Time-indexed record of one closed-loop run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub times: Vec<f64>,
    pub modes: Vec<ActuationMode>,
    pub tracks: Vec<AgentTrack>,
    /// Edge-major: `edge_e[k][s]` is e_k at sample s.
    pub edge_e: Vec<Vec<f64>>,
    pub xi_norm: Vec<f64>,
    pub lyapunov: Vec<f64>,
}

impl TrajectoryLog {
    pub fn n_samples(&self) -> usize {
        self.times.len()
    }

    pub fn n_agents(&self) -> usize {
        self.tracks.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edge_e.len()
    }

    /// Stacked actuated velocities at one sample, in agent order.
    pub fn xi_at(&self, s: usize) -> Vec<f64> {
        let mut out = Vec::new();
        for (track, mode) in self.tracks.iter().zip(&self.modes) {
            match mode {
                ActuationMode::FullyActuated => out.extend([track.dq1[s], track.dq2[s]]),
                ActuationMode::PassiveActive => out.push(track.dq2[s]),
            }
        }
        out
    }

    /// Terminal summary of the run.
    pub fn summary(&self) -> RunSummary {
        let last = self.n_samples() - 1;
        let final_edge_errors = self.edge_e.iter().map(|s| s[last]).collect();
        let final_q = self
            .tracks
            .iter()
            .map(|t| [t.q1[last], t.q2[last]])
            .collect();
        let max_holonomy_drift = self
            .tracks
            .iter()
            .enumerate()
            .filter_map(|(i, t)| {
                t.holonomy_drift
                    .as_ref()
                    .map(|d| (i, d.iter().cloned().fold(0.0, f64::max)))
            })
            .collect();
        let max_momentum_residual = self
            .tracks
            .iter()
            .enumerate()
            .filter_map(|(i, t)| {
                t.momentum_residual
                    .as_ref()
                    .map(|d| (i, d.iter().cloned().fold(0.0, f64::max)))
            })
            .collect();
        let min_jacobian_margin = self
            .tracks
            .iter()
            .map(|t| t.jac_margin.iter().cloned().fold(f64::INFINITY, f64::min))
            .collect();
        RunSummary {
            t_final: self.times[last],
            final_edge_errors,
            final_q,
            final_xi_norm: self.xi_norm[last],
            final_lyapunov: self.lyapunov[last],
            max_holonomy_drift,
            max_momentum_residual,
            min_jacobian_margin,
            u_monotonicity_violations: u_violations(&self.lyapunov).len(),
        }
    }
}

/// Terminal summary of a run (what the CLI prints and serializes).
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub t_final: f64,
    pub final_edge_errors: Vec<f64>,
    pub final_q: Vec<[f64; 2]>,
    pub final_xi_norm: f64,
    pub final_lyapunov: f64,
    /// (agent index, max drift) per PA agent.
    pub max_holonomy_drift: Vec<(usize, f64)>,
    /// (agent index, max residual) per PA agent.
    pub max_momentum_residual: Vec<(usize, f64)>,
    /// Per-agent minimum margin over the run (INFINITY when disabled).
    pub min_jacobian_margin: Vec<f64>,
    pub u_monotonicity_violations: usize,
}

/// Validate initial conditions, run the closed loop, and log at the
/// configured stride (the final state is always logged).
pub fn run(network: &mut Network, config: &SimConfig) -> Result<TrajectoryLog> {
    config.validate()?;
    for (i, a) in network.agents.iter().enumerate() {
        if a.mode == ActuationMode::PassiveActive {
            // PA arms must enter the loop stationary, on an established branch.
            if a.state.qdot != Vector2::zeros() {
                return Err(Error::AssumptionViolation(format!(
                    "PA agent {i} must start at rest"
                )));
            }
            if a.branch.is_none() {
                return Err(Error::Scenario(format!(
                    "PA agent {i} has no holonomic branch"
                )));
            }
        }
        if !a.state.is_finite() {
            return Err(Error::NonFinite("initial joint state"));
        }
    }

    let n_steps = (config.t_final / config.dt).round().max(1.0) as usize;
    let n_agents = network.n_agents();
    let mut log = TrajectoryLog {
        times: Vec::new(),
        modes: network.agents.iter().map(|a| a.mode).collect(),
        tracks: vec![AgentTrack::default(); n_agents],
        edge_e: vec![Vec::new(); network.formation.n_edges()],
        xi_norm: Vec::new(),
        lyapunov: Vec::new(),
    };
    for (track, agent) in log.tracks.iter_mut().zip(&network.agents) {
        if config.monitors.holonomy && agent.mode == ActuationMode::PassiveActive {
            track.holonomy_drift = Some(Vec::new());
            track.momentum_residual = Some(Vec::new());
        }
    }

    record_sample(network, config, 0.0, &mut log);
    for s in 0..n_steps {
        let t_now = config.dt * s as f64;
        step(network, &config.gains, config.dt, t_now)?;
        let logged = (s + 1) % config.log_stride == 0 || s + 1 == n_steps;
        if logged {
            record_sample(network, config, config.dt * (s + 1) as f64, &mut log);
        }
    }
    Ok(log)
}

fn record_sample(network: &Network, config: &SimConfig, t: f64, log: &mut TrajectoryLog) {
    let (u, es, _) = network.torques(&config.gains);
    let kinetic = network.kinetic_energy();
    log.times.push(t);
    log.xi_norm.push(network.xi_norm());
    log.lyapunov
        .push(crate::control::lyapunov(&config.gains, &es.e, kinetic));
    for (k, series) in log.edge_e.iter_mut().enumerate() {
        series.push(es.e[k]);
    }
    for ((agent, track), torque) in network.agents.iter().zip(&mut log.tracks).zip(&u) {
        let xy = agent.end_effector();
        track.q1.push(agent.state.q[0]);
        track.q2.push(agent.state.q[1]);
        track.dq1.push(agent.state.qdot[0]);
        track.dq2.push(agent.state.qdot[1]);
        track.x.push(xy[0]);
        track.y.push(xy[1]);
        track.u1.push(torque.0[0]);
        track.u2.push(torque.0[1]);
        if config.monitors.margins {
            track.jac_margin.push(agent.jacobian_margin());
        }
        if let Some(drift) = track.holonomy_drift.as_mut() {
            let branch = agent.branch.as_ref().expect("PA agent carries a branch");
            drift.push((agent.state.q[0] - branch.constrained_q1(agent.state.q[1])).abs());
        }
        if let Some(residual) = track.momentum_residual.as_mut() {
            let m = agent.alpha.mass_matrix(agent.state.q[1]);
            residual
                .push((m[(0, 0)] * agent.state.qdot[0] + m[(0, 1)] * agent.state.qdot[1]).abs());
        }
    }
}

/// A logged step where U rose by more than the allowed slack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UViolation {
    /// Sample index of the *later* sample (the one that rose).
    pub index: usize,
    pub u_prev: f64,
    pub u_next: f64,
}

fn u_violations(u: &[f64]) -> Vec<UViolation> {
    u.windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] > w[0] + U_SLACK_REL * (1.0 + w[0]))
        .map(|(i, w)| UViolation {
            index: i + 1,
            u_prev: w[0],
            u_next: w[1],
        })
        .collect()
}

/// Verdict for one monitor.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorVerdict {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Pass/fail per monitor for a completed log.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub monitors: Vec<MonitorVerdict>,
    pub u_violations: Vec<UViolation>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.monitors.iter().all(|m| m.pass)
    }
}

impl std::fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for m in &self.monitors {
            writeln!(
                f,
                "{} {}: {}",
                if m.pass { "PASS" } else { "FAIL" },
                m.name,
                m.detail
            )?;
        }
        Ok(())
    }
}

/// Check every recorded monitor series against its bound.
pub fn verify_run(log: &TrajectoryLog) -> VerificationReport {
    let mut monitors = Vec::new();

    let violations = u_violations(&log.lyapunov);
    monitors.push(MonitorVerdict {
        name: "lyapunov-monotonicity",
        pass: violations.is_empty(),
        detail: if violations.is_empty() {
            format!(
                "U non-increasing over {} samples (slack {U_SLACK_REL:.0e})",
                log.n_samples()
            )
        } else {
            format!(
                "{} violation(s), first at sample {} (U {} -> {})",
                violations.len(),
                violations[0].index,
                violations[0].u_prev,
                violations[0].u_next
            )
        },
    });

    let mut max_drift: Option<(usize, f64)> = None;
    let mut max_res: Option<(usize, f64)> = None;
    for (i, t) in log.tracks.iter().enumerate() {
        if let Some(d) = &t.holonomy_drift {
            let m = d.iter().cloned().fold(0.0, f64::max);
            if max_drift.is_none_or(|(_, v)| m > v) {
                max_drift = Some((i, m));
            }
        }
        if let Some(r) = &t.momentum_residual {
            let m = r.iter().cloned().fold(0.0, f64::max);
            if max_res.is_none_or(|(_, v)| m > v) {
                max_res = Some((i, m));
            }
        }
    }
    monitors.push(MonitorVerdict {
        name: "holonomy-drift",
        pass: max_drift.is_none_or(|(_, v)| v <= HOLONOMY_DRIFT_TOL),
        detail: match max_drift {
            Some((i, v)) => format!(
                "max |q1 - f(q2)| = {v:.3e} (agent {}, bound {HOLONOMY_DRIFT_TOL:.0e})",
                i + 1
            ),
            None => "no PA agents or monitor disabled".into(),
        },
    });
    monitors.push(MonitorVerdict {
        name: "momentum-residual",
        pass: max_res.is_none_or(|(_, v)| v <= MOMENTUM_RESIDUAL_TOL),
        detail: match max_res {
            Some((i, v)) => {
                format!(
                    "max |M11 dq1 + M12 dq2| = {v:.3e} (agent {}, bound {MOMENTUM_RESIDUAL_TOL:.0e})",
                    i + 1
                )
            }
            None => "no PA agents or monitor disabled".into(),
        },
    });

    let min_margin = log
        .tracks
        .iter()
        .enumerate()
        .filter(|(_, t)| !t.jac_margin.is_empty())
        .map(|(i, t)| {
            (
                i,
                t.jac_margin.iter().cloned().fold(f64::INFINITY, f64::min),
            )
        })
        .min_by(|a, b| a.1.total_cmp(&b.1));
    monitors.push(MonitorVerdict {
        name: "jacobian-margins",
        pass: min_margin.is_none_or(|(_, v)| v >= JACOBIAN_MARGIN_MIN),
        detail: match min_margin {
            Some((i, v)) => {
                format!(
                    "min margin = {v:.3e} (agent {}, floor {JACOBIAN_MARGIN_MIN:.0e})",
                    i + 1
                )
            }
            None => "monitor disabled".into(),
        },
    });

    let final_xi = *log.xi_norm.last().expect("non-empty log");
    monitors.push(MonitorVerdict {
        name: "terminal-xi",
        pass: final_xi <= TERMINAL_XI_TOL,
        detail: format!("|xi(T)| = {final_xi:.3e} (bound {TERMINAL_XI_TOL:.0e})"),
    });

    VerificationReport {
        monitors,
        u_violations: violations,
    }
}
