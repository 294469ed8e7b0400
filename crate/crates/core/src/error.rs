use thiserror::Error;

/// Errors produced by model construction, validation, and simulation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid manipulator parameters: {0}")]
    InvalidParams(String),

    #[error("invalid lumped inertial parameters: {0}")]
    InvalidAlphas(String),

    #[error("non-finite numeric input in {0}")]
    NonFinite(&'static str),

    /// A passive-active arm was asked to do something that requires a
    /// stationary start (zero initial joint velocity).
    #[error("stationary-start requirement violated: {0}")]
    AssumptionViolation(String),

    /// Initial actuated joint angle outside [-pi, pi]; the holonomic
    /// branch is only defined for stationary starts inside one period.
    #[error("initial actuated joint angle {0} rad outside [-pi, pi]")]
    BranchDomain(f64),

    #[error("invalid formation graph: {0}")]
    InvalidFormation(String),

    #[error("invalid controller gains: {0}")]
    InvalidGains(String),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    /// The integrator produced a non-finite state. Reported with the first
    /// offending agent (0-based) and the time at the end of the bad step.
    #[error("simulation diverged: non-finite state for agent {agent} at t = {t} s")]
    Divergence { agent: usize, t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
