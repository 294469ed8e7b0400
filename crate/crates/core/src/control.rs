//! The distributed end-effector formation control law for both actuation
//! modes, and the Lyapunov/stationarity certificate evaluators.
//!
//! Each agent's torque depends only on its own joint state and the gradient
//! contribution of its incident edges; the operation signatures admit
//! nothing else, which is what makes the law distributed.

use nalgebra::{Matrix2, Vector2};

use crate::dynamics::ControlTorque;
use crate::error::{Error, Result};
use crate::formation::potential;

/// How an arm is driven.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActuationMode {
    /// Both joints driven.
    FullyActuated,
    /// Passive first joint, driven second joint.
    PassiveActive,
}

/// Shared scalar controller gains. [`Gains::new`] enforces the strict
/// positivity required by the stability argument; diagnostic runs (zero-gain
/// free motion, energy audits) may build the struct literally.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gains {
    pub kp: f64,
    pub kd: f64,
}

impl Gains {
    pub fn new(kp: f64, kd: f64) -> Result<Self> {
        if !(kp.is_finite() && kd.is_finite()) || kp <= 0.0 || kd <= 0.0 {
            return Err(Error::InvalidGains(format!(
                "gains must be finite and strictly positive, got kp = {kp}, kd = {kd}"
            )));
        }
        Ok(Self { kp, kd })
    }
}

/// Fully-actuated law: `u = -kp J^T ehat - kd qdot`.
pub fn control_fa(
    gains: &Gains,
    j: &Matrix2<f64>,
    e_hat: &Vector2<f64>,
    qdot: &Vector2<f64>,
) -> ControlTorque {
    ControlTorque(-gains.kp * (j.transpose() * e_hat) - gains.kd * qdot)
}

/// Passive-active law: `u = (0, -kp Jbar . ehat - kd q2dot)`. The passive
/// joint receives exactly zero torque.
pub fn control_pa(
    gains: &Gains,
    j_bar: &Vector2<f64>,
    e_hat: &Vector2<f64>,
    qdot2: f64,
) -> ControlTorque {
    ControlTorque::pa(-gains.kp * j_bar.dot(e_hat) - gains.kd * qdot2)
}

/// Lyapunov certificate `U = kp V(e) + kinetic`, where `kinetic` is the
/// total kinetic energy of the network (all joints, passive ones included).
pub fn lyapunov(gains: &Gains, edge_errors: &[f64], kinetic: f64) -> f64 {
    gains.kp * potential(edge_errors) + kinetic
}

/// Stationarity residual of a fully-actuated agent: `|J^T ehat|`. Zero in
/// the limit certifies `ehat = 0` wherever J is full rank.
pub fn fa_stationarity_residual(j: &Matrix2<f64>, e_hat: &Vector2<f64>) -> f64 {
    (j.transpose() * e_hat).norm()
}

/// Stationarity residual of a PA agent: `|Jstar ehat|`. The asymptote only
/// pins the scalar `Jbar . ehat`; the augmented second row closes the system
/// so that a nonzero residual cannot hide in the orthogonal direction.
pub fn pa_stationarity_residual(j_star: &Matrix2<f64>, e_hat: &Vector2<f64>) -> f64 {
    (j_star * e_hat).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn gains() -> Gains {
        Gains::new(800.0, 600.0).unwrap()
    }

    #[test]
    fn gains_validation() {
        assert!(Gains::new(0.0, 1.0).is_err());
        assert!(Gains::new(1.0, -2.0).is_err());
        assert!(Gains::new(f64::NAN, 1.0).is_err());
        assert!(Gains::new(800.0, 600.0).is_ok());
    }

    #[test]
    fn fa_equilibrium_is_zero_torque() {
        let u = control_fa(
            &gains(),
            &Matrix2::identity(),
            &Vector2::zeros(),
            &Vector2::zeros(),
        );
        assert_eq!(u.0, Vector2::zeros());
    }

    #[test]
    fn fa_reference_value() {
        let u = control_fa(
            &gains(),
            &Matrix2::identity(),
            &Vector2::new(1.0, 0.0),
            &Vector2::zeros(),
        );
        assert_abs_diff_eq!(u.0, Vector2::new(-800.0, 0.0));
    }

    #[test]
    fn fa_linearity_in_gradient() {
        let j = Matrix2::new(0.3, -1.1, 0.7, 0.2);
        let e = Vector2::new(0.4, -0.9);
        for a in [-3.0, 0.5, 2.0] {
            let scaled = control_fa(&gains(), &j, &(a * e), &Vector2::zeros());
            let reference = control_fa(&gains(), &j, &e, &Vector2::zeros());
            assert_abs_diff_eq!(scaled.0, a * reference.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn pa_equilibrium_and_first_component() {
        let u = control_pa(&gains(), &Vector2::new(0.4, 0.8), &Vector2::zeros(), 0.0);
        assert_eq!(u.0, Vector2::zeros());
        let u = control_pa(
            &gains(),
            &Vector2::new(0.4, 0.8),
            &Vector2::new(1.0, -2.0),
            0.7,
        );
        assert_eq!(u.0[0], 0.0); // bit-exact passive joint
    }

    #[test]
    fn pa_inner_product_expansion() {
        let (a, b, p, r, w) = (0.3, -1.2, 0.8, 0.5, -0.4);
        let u = control_pa(&gains(), &Vector2::new(a, b), &Vector2::new(p, r), w);
        assert_relative_eq!(
            u.0[1],
            -800.0 * (a * p + b * r) - 600.0 * w,
            max_relative = 1e-14
        );
    }

    #[test]
    fn lyapunov_values() {
        let g = gains();
        assert_eq!(lyapunov(&g, &[0.0, 0.0], 0.0), 0.0);
        // Kinetic term vanishes at rest.
        let e = [0.2, -0.4];
        assert_relative_eq!(
            lyapunov(&g, &e, 0.0),
            800.0 * potential(&e),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            lyapunov(&g, &e, 1.5),
            800.0 * potential(&e) + 1.5,
            max_relative = 1e-15
        );
    }

    #[test]
    fn stationarity_residuals_vanish_with_gradient() {
        let j = Matrix2::new(0.3, -1.1, 0.7, 0.2);
        assert_eq!(fa_stationarity_residual(&j, &Vector2::zeros()), 0.0);
        assert_eq!(pa_stationarity_residual(&j, &Vector2::zeros()), 0.0);
    }
}
