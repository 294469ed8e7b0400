//! Euler-Lagrange model of a single two-link planar arm moving in a
//! horizontal plane (no gravity): mass matrix, Coriolis/centrifugal matrix,
//! forward dynamics, and the standard structural checks (positive-definite
//! mass matrix, skew-symmetry of dM/dt - 2C).
//!
//! Everything is expressed through the three lumped inertial parameters
//!
//! ```text
//! alpha1 = m1 l1^2 + m2 L1^2 + I1
//! alpha2 = m2 l2^2 + I2
//! alpha3 = m2 L1 l2
//! ```
//!
//! which satisfy `alpha1 alpha2 > alpha3^2` for any physical link, so
//! `det M(q2) = alpha1 alpha2 - alpha3^2 cos^2 q2` is bounded away from zero
//! and the 2x2 inverse can be written in closed form.

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};

/// Physical constants of one arm. Validated once at construction; all
/// downstream operations assume the invariants hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManipulatorParams {
    m1: f64,
    m2: f64,
    i1: f64,
    i2: f64,
    len1: f64,
    len2: f64,
    com1: f64,
    com2: f64,
}

impl ManipulatorParams {
    /// `m*` link masses (kg), `i*` link inertias about the COM (kg m^2),
    /// `len*` link lengths (m), `com*` joint-to-COM distances (m).
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        m1: f64,
        m2: f64,
        i1: f64,
        i2: f64,
        len1: f64,
        len2: f64,
        com1: f64,
        com2: f64,
    ) -> Result<Self> {
        let fields = [
            ("m1", m1),
            ("m2", m2),
            ("I1", i1),
            ("I2", i2),
            ("L1", len1),
            ("L2", len2),
            ("l1", com1),
            ("l2", com2),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParams(format!(
                    "{name} must be finite and strictly positive, got {v}"
                )));
            }
        }
        if com1 > len1 {
            return Err(Error::InvalidParams(format!(
                "l1 = {com1} exceeds link length L1 = {len1}"
            )));
        }
        if com2 > len2 {
            return Err(Error::InvalidParams(format!(
                "l2 = {com2} exceeds link length L2 = {len2}"
            )));
        }
        let p = Self {
            m1,
            m2,
            i1,
            i2,
            len1,
            len2,
            com1,
            com2,
        };
        // det M = alpha1 alpha2 - alpha3^2 cos^2 q2 must stay positive.
        let a = p.alphas_unchecked();
        if a.alpha1 * a.alpha2 <= a.alpha3 * a.alpha3 {
            return Err(Error::InvalidParams(format!(
                "degenerate inertia: alpha1*alpha2 = {} <= alpha3^2 = {}",
                a.alpha1 * a.alpha2,
                a.alpha3 * a.alpha3
            )));
        }
        Ok(p)
    }

    pub fn m1(&self) -> f64 {
        self.m1
    }
    pub fn m2(&self) -> f64 {
        self.m2
    }
    pub fn i1(&self) -> f64 {
        self.i1
    }
    pub fn i2(&self) -> f64 {
        self.i2
    }
    /// Length of link 1 (m).
    pub fn len1(&self) -> f64 {
        self.len1
    }
    /// Length of link 2 (m).
    pub fn len2(&self) -> f64 {
        self.len2
    }
    pub fn com1(&self) -> f64 {
        self.com1
    }
    pub fn com2(&self) -> f64 {
        self.com2
    }

    /// Maximum reach of the end effector from the base.
    pub fn reach(&self) -> f64 {
        self.len1 + self.len2
    }

    fn alphas_unchecked(&self) -> AlphaParams {
        AlphaParams {
            alpha1: self.m1 * self.com1 * self.com1 + self.m2 * self.len1 * self.len1 + self.i1,
            alpha2: self.m2 * self.com2 * self.com2 + self.i2,
            alpha3: self.m2 * self.len1 * self.com2,
        }
    }

    /// Lumped inertial parameters of this arm.
    pub fn alphas(&self) -> AlphaParams {
        self.alphas_unchecked()
    }
}

/// Lumped inertial parameters (kg m^2). `alpha3 = 0` is the valid
/// decoupled-link limit (massless second link), hence `>= 0` there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
}

impl AlphaParams {
    pub fn new(alpha1: f64, alpha2: f64, alpha3: f64) -> Result<Self> {
        if !(alpha1.is_finite() && alpha2.is_finite() && alpha3.is_finite()) {
            return Err(Error::InvalidAlphas("non-finite entry".into()));
        }
        if alpha1 <= 0.0 || alpha2 <= 0.0 || alpha3 < 0.0 {
            return Err(Error::InvalidAlphas(format!(
                "need alpha1 > 0, alpha2 > 0, alpha3 >= 0, got ({alpha1}, {alpha2}, {alpha3})"
            )));
        }
        if alpha1 * alpha2 <= alpha3 * alpha3 {
            return Err(Error::InvalidAlphas(format!(
                "alpha1*alpha2 = {} <= alpha3^2 = {}",
                alpha1 * alpha2,
                alpha3 * alpha3
            )));
        }
        Ok(Self {
            alpha1,
            alpha2,
            alpha3,
        })
    }

    /// Mass matrix `M(q2)`; symmetric positive definite for all `q2`.
    pub fn mass_matrix(&self, q2: f64) -> Matrix2<f64> {
        let c = q2.cos();
        let m12 = self.alpha2 + self.alpha3 * c;
        Matrix2::new(
            self.alpha1 + self.alpha2 + 2.0 * self.alpha3 * c,
            m12,
            m12,
            self.alpha2,
        )
    }

    /// `dM/dq2`, used to evaluate `dM/dt = (dM/dq2) q2dot` analytically.
    pub fn mass_matrix_dq2(&self, q2: f64) -> Matrix2<f64> {
        let s = q2.sin();
        Matrix2::new(
            -2.0 * self.alpha3 * s,
            -self.alpha3 * s,
            -self.alpha3 * s,
            0.0,
        )
    }

    /// `det M(q2) = alpha1 alpha2 - alpha3^2 cos^2 q2 > 0`.
    pub fn mass_det(&self, q2: f64) -> f64 {
        let c = q2.cos();
        self.alpha1 * self.alpha2 - self.alpha3 * self.alpha3 * c * c
    }

    /// Coriolis/centrifugal matrix `C(q, qdot)`; vanishes at rest and at
    /// `q2 = k pi`.
    pub fn coriolis_matrix(&self, state: &JointState) -> Matrix2<f64> {
        let s = state.q[1].sin();
        let (d1, d2) = (state.qdot[0], state.qdot[1]);
        Matrix2::new(
            -self.alpha3 * d2 * s,
            -self.alpha3 * (d1 + d2) * s,
            self.alpha3 * d1 * s,
            0.0,
        )
    }

    /// Joint accelerations solving `M(q) qddot = u - C(q, qdot) qdot`.
    ///
    /// Uses the closed-form 2x2 inverse (no factorization in the hot loop);
    /// the determinant is bounded below by `alpha1 alpha2 - alpha3^2 > 0`.
    pub fn forward_dynamics(&self, state: &JointState, u: &ControlTorque) -> Result<Vector2<f64>> {
        if !state.is_finite() {
            return Err(Error::NonFinite("forward_dynamics joint state"));
        }
        if !(u.0[0].is_finite() && u.0[1].is_finite()) {
            return Err(Error::NonFinite("forward_dynamics torque"));
        }
        let m = self.mass_matrix(state.q[1]);
        let rhs = u.0 - self.coriolis_matrix(state) * state.qdot;
        let det = self.mass_det(state.q[1]);
        Ok(Vector2::new(
            (m[(1, 1)] * rhs[0] - m[(0, 1)] * rhs[1]) / det,
            (m[(0, 0)] * rhs[1] - m[(1, 0)] * rhs[0]) / det,
        ))
    }

    /// Frobenius norm of `S + S^T` with `S = dM/dt - 2C`; zero up to
    /// roundoff for the model (property P2 of Euler-Lagrange systems).
    pub fn skew_residual(&self, state: &JointState) -> f64 {
        let m_dot = self.mass_matrix_dq2(state.q[1]) * state.qdot[1];
        let s = m_dot - 2.0 * self.coriolis_matrix(state);
        (s + s.transpose()).norm()
    }

    /// Kinetic energy `qdot^T M(q) qdot / 2`.
    pub fn kinetic_energy(&self, state: &JointState) -> f64 {
        0.5 * (state.qdot.dot(&(self.mass_matrix(state.q[1]) * state.qdot)))
    }
}

/// Joint positions (rad) and velocities (rad/s) of one arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointState {
    pub q: Vector2<f64>,
    pub qdot: Vector2<f64>,
}

impl JointState {
    pub fn new(q1: f64, q2: f64, qdot1: f64, qdot2: f64) -> Self {
        Self {
            q: Vector2::new(q1, q2),
            qdot: Vector2::new(qdot1, qdot2),
        }
    }

    pub fn at_rest(q1: f64, q2: f64) -> Self {
        Self::new(q1, q2, 0.0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.q.iter().chain(self.qdot.iter()).all(|v| v.is_finite())
    }
}

/// Joint torques (N m). For passive-active arms the first component is
/// identically zero; construct those through [`ControlTorque::pa`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlTorque(pub Vector2<f64>);

impl ControlTorque {
    pub const ZERO: Self = Self(Vector2::new(0.0, 0.0));

    pub fn fa(u1: f64, u2: f64) -> Self {
        Self(Vector2::new(u1, u2))
    }

    /// Second-joint-only torque; the passive first joint gets exactly 0.
    pub fn pa(u2: f64) -> Self {
        Self(Vector2::new(0.0, u2))
    }
}

/// The reference arm used across tests: uniform 1.5 m links.
#[cfg(test)]
pub(crate) fn test_params() -> ManipulatorParams {
    ManipulatorParams::new(1.2, 1.0, 0.2250, 0.1875, 1.5, 1.5, 0.75, 0.75).unwrap()
}
