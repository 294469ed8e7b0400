//! Distributed end-effector formation control of planar two-link
//! manipulator networks.
//!
//! The crate models a mixed group of arms moving in a shared horizontal
//! plane — fully-actuated ones and passive-active (PA) ones whose first
//! joint carries no actuator — and drives their end effectors to a desired
//! rigid formation shape with a distributed, gradient-based law:
//!
//! * [`dynamics`] — Euler-Lagrange model of one arm (mass/Coriolis terms,
//!   closed-form forward dynamics, structural property checks);
//! * [`kinematics`] — forward kinematics, Jacobians, the holonomic
//!   constraint curve of a PA arm started at rest, the reduced/augmented
//!   Jacobians, and singularity detection along the constraint curve;
//! * [`formation`] — incidence matrix, edge errors, formation potential and
//!   gradient, and the infinitesimal-rigidity rank test;
//! * [`control`] — the distributed control law for both actuation modes and
//!   the Lyapunov certificate;
//! * [`sim`] — fixed-step RK4 closed-loop simulation with per-step
//!   verification monitors and trajectory logging.
//!
//! ```
//! use armform::{
//!     Agent, BasePose, FormationSpec, Gains, JointState, ManipulatorParams, Network, SimConfig,
//! };
//!
//! // Two identical arms 0.6 m apart, one of them passive-active, driven
//! // toward an inter-effector distance of 0.5 m.
//! let params = ManipulatorParams::new(1.2, 1.0, 0.225, 0.1875, 1.5, 1.5, 0.75, 0.75)?;
//! let start = JointState::at_rest(-1.2, 0.8);
//! let agents = vec![
//!     Agent::fully_actuated(params, BasePose::from([0.0, 0.0]), start)?,
//!     Agent::passive_active(params, BasePose::from([0.6, 0.0]), start)?,
//! ];
//! let formation = FormationSpec::new(2, vec![(1, 2)], vec![0.5])?;
//! let mut network = Network::new(agents, formation)?;
//!
//! let mut config = SimConfig::new(Gains::new(800.0, 600.0)?);
//! config.t_final = 0.05;
//! let log = armform::sim::run(&mut network, &config)?;
//!
//! assert_eq!(log.n_samples(), 51);
//! assert!(log.lyapunov.last() < log.lyapunov.first()); // certificate decays
//! # Ok::<(), armform::Error>(())
//! ```

pub mod control;
pub mod dynamics;
pub mod error;
pub mod formation;
pub mod kinematics;
pub mod sim;

pub use control::{ActuationMode, Gains};
pub use dynamics::{AlphaParams, ControlTorque, JointState, ManipulatorParams};
pub use error::{Error, Result};
pub use formation::{EdgeState, FormationSpec};
pub use kinematics::{BasePose, HolonomicBranch};
pub use sim::{Agent, Network, SimConfig, TrajectoryLog};
