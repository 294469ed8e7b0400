//! Forward kinematics, Jacobians, and the holonomic reduction of the
//! passive-active (PA) arm.
//!
//! A PA arm started at rest conserves the generalized momentum conjugate to
//! its passive first joint:
//!
//! ```text
//! M11(q2) q1dot + M12(q2) q2dot = 0
//! ```
//!
//! which integrates to a holonomic constraint `q1 = f(q2)` with
//!
//! ```text
//! f(q2) = -q2/2 - gamma atan(rho tan(q2/2)) - gamma k pi + eta
//! gamma = (alpha2 - alpha1) / sqrt((alpha1 + alpha2)^2 - 4 alpha3^2)
//! rho   = sqrt((alpha1 + alpha2 - 2 alpha3) / (alpha1 + alpha2 + 2 alpha3))
//! ```
//!
//! `eta` is fixed by the initial configuration. The `atan(rho tan(q2/2))`
//! term is evaluated as `atan2(rho sin(q2/2), cos(q2/2))` on the shifted
//! angle `q2 - 2 k pi`, which glues the branches continuously across odd
//! multiples of pi (the `-gamma k pi` term absorbs the jump). Along the
//! constraint the end effector moves on a curve; its tangent with respect to
//! the actuated joint is the reduced Jacobian `Jbar`, and the 2x2 completion
//! `Jstar` (rows `(Jbar1, Jbar2)` and `(Jbar1, -Jbar2)`) is invertible
//! exactly where `Jbar1 Jbar2 != 0`.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix2, Vector2};

use crate::dynamics::{AlphaParams, JointState, ManipulatorParams};
use crate::error::{Error, Result};

/// Position of a fixed manipulator base in the shared X-Y plane (m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasePose(pub Vector2<f64>);

impl From<[f64; 2]> for BasePose {
    fn from(v: [f64; 2]) -> Self {
        Self(Vector2::new(v[0], v[1]))
    }
}

/// End-effector position `x = h(q) + x0`.
///
/// Note the sign convention: the first link
/// points along +Y at `q = 0`, so `h = (-L1 sin q1 - L2 sin(q1+q2),
/// L1 cos q1 + L2 cos(q1+q2))`.
pub fn fk(params: &ManipulatorParams, q: &Vector2<f64>, base: &BasePose) -> Vector2<f64> {
    let (l1, l2) = (params.len1(), params.len2());
    Vector2::new(
        -l1 * q[0].sin() - l2 * (q[0] + q[1]).sin(),
        l1 * q[0].cos() + l2 * (q[0] + q[1]).cos(),
    ) + base.0
}

/// Task-space Jacobian `J = dh/dq`; `det J = L1 L2 sin q2`, so the arm is
/// singular exactly at `q2 = k pi` (links aligned).
pub fn jacobian(params: &ManipulatorParams, q: &Vector2<f64>) -> Matrix2<f64> {
    let (l1, l2) = (params.len1(), params.len2());
    let (c1, s1) = (q[0].cos(), q[0].sin());
    let (c12, s12) = ((q[0] + q[1]).cos(), (q[0] + q[1]).sin());
    Matrix2::new(
        -l1 * c1 - l2 * c12,
        -l2 * c12,
        -l1 * s1 - l2 * s12,
        -l2 * s12,
    )
}

/// Constraint-curve data of one PA arm started at rest: `q1 = f(q2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolonomicBranch {
    gamma: f64,
    rho: f64,
    eta: f64,
    /// Branch index at initialization; the active index is derived from q2
    /// during evaluation, so this stays 0 for an initial angle in [-pi, pi].
    k: i32,
    q0: JointState,
}

impl HolonomicBranch {
    /// Fixes the constraint curve through `q0`. Requires a stationary start
    /// and an initial actuated angle within [-pi, pi].
    pub fn new(alpha: &AlphaParams, q0: &JointState) -> Result<Self> {
        if q0.qdot != Vector2::zeros() {
            return Err(Error::AssumptionViolation(format!(
                "holonomic branch needs qdot(0) = 0, got ({}, {})",
                q0.qdot[0], q0.qdot[1]
            )));
        }
        if !q0.q.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("holonomic branch initial state"));
        }
        if q0.q[1].abs() > PI {
            return Err(Error::BranchDomain(q0.q[1]));
        }
        let sum = alpha.alpha1 + alpha.alpha2;
        let gamma =
            (alpha.alpha2 - alpha.alpha1) / (sum * sum - 4.0 * alpha.alpha3 * alpha.alpha3).sqrt();
        let rho = ((sum - 2.0 * alpha.alpha3) / (sum + 2.0 * alpha.alpha3)).sqrt();
        let eta = q0.q[1] / 2.0 + q0.q[0] + gamma * glued_atan(rho, q0.q[1]);
        Ok(Self {
            gamma,
            rho,
            eta,
            k: 0,
            q0: *q0,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }
    pub fn initial_state(&self) -> JointState {
        self.q0
    }

    /// Branch index for a given actuated angle: `k = floor((q2 + pi) / 2pi)`.
    pub fn branch_index(q2: f64) -> i32 {
        ((q2 + PI) / TAU).floor() as i32
    }

    /// The passive joint angle on this constraint curve, continuous in `q2`
    /// across branch boundaries at odd multiples of pi.
    pub fn constrained_q1(&self, q2: f64) -> f64 {
        let k = Self::branch_index(q2);
        let w = q2 - TAU * f64::from(k);
        -q2 / 2.0 - self.gamma * glued_atan(self.rho, w) - self.gamma * f64::from(k) * PI + self.eta
    }
}

/// `atan(rho tan(w/2))` for `w` in [-pi, pi], extended continuously to the
/// endpoints (`atan2(rho sin(w/2), cos(w/2))` hits +-pi/2 there instead of
/// blowing through tan).
fn glued_atan(rho: f64, w: f64) -> f64 {
    let half = 0.5 * w;
    (rho * half.sin()).atan2(half.cos())
}

/// Reduced Jacobian of a PA arm: end-effector velocity per unit actuated
/// joint rate, `xdot = Jbar(q) q2dot`, obtained by eliminating `q1dot`
/// through the conserved momentum.
pub fn reduced_jacobian(
    alpha: &AlphaParams,
    params: &ManipulatorParams,
    q: &Vector2<f64>,
) -> Vector2<f64> {
    let m = alpha.mass_matrix(q[1]);
    let ratio = m[(0, 1)] / m[(0, 0)];
    let j = jacobian(params, q);
    Vector2::new(
        -j[(0, 0)] * ratio + j[(0, 1)],
        -j[(1, 0)] * ratio + j[(1, 1)],
    )
}

/// 2x2 completion of the reduced Jacobian with rows `(Jbar1, Jbar2)` and
/// `(Jbar1, -Jbar2)`; `det = -2 Jbar1 Jbar2`. Singularity is reported by the
/// caller via the determinant, never thrown.
pub fn augmented_jacobian(
    alpha: &AlphaParams,
    params: &ManipulatorParams,
    q: &Vector2<f64>,
) -> Matrix2<f64> {
    let jb = reduced_jacobian(alpha, params, q);
    Matrix2::new(jb[0], jb[1], jb[0], -jb[1])
}

/// Default scan resolution for [`find_singularities`] (rad).
pub const SINGULARITY_GRID_STEP: f64 = 1e-3;
/// Bisection terminates when the bracket is narrower than this (rad).
pub const SINGULARITY_BISECT_TOL: f64 = 1e-9;

/// Roots of `g(q2) = Jbar1(q2) Jbar2(q2)` along the branch, located by a
/// sign-change scan at [`SINGULARITY_GRID_STEP`] refined by bisection.
/// These are the actuated angles where the augmented Jacobian loses rank.
pub fn find_singularities(
    alpha: &AlphaParams,
    params: &ManipulatorParams,
    branch: &HolonomicBranch,
    interval: (f64, f64),
) -> Vec<f64> {
    find_singularities_with_grid(alpha, params, branch, interval, SINGULARITY_GRID_STEP)
}

/// Same scan with an explicit grid step (grid-refinement checks).
pub fn find_singularities_with_grid(
    alpha: &AlphaParams,
    params: &ManipulatorParams,
    branch: &HolonomicBranch,
    interval: (f64, f64),
    step: f64,
) -> Vec<f64> {
    let g = |q2: f64| {
        let q = Vector2::new(branch.constrained_q1(q2), q2);
        let jb = reduced_jacobian(alpha, params, &q);
        jb[0] * jb[1]
    };
    let (lo, hi) = interval;
    let mut roots = Vec::new();
    let n = ((hi - lo) / step).ceil() as usize;
    let mut x_prev = lo;
    let mut g_prev = g(lo);
    for i in 1..=n {
        let x = if i == n { hi } else { lo + step * i as f64 };
        let gx = g(x);
        if g_prev == 0.0 {
            push_root(&mut roots, x_prev);
        } else if g_prev * gx < 0.0 {
            push_root(&mut roots, bisect(&g, x_prev, x, g_prev));
        }
        x_prev = x;
        g_prev = gx;
    }
    if g_prev == 0.0 {
        push_root(&mut roots, x_prev);
    }
    roots
}

fn bisect(g: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut g_lo: f64) -> f64 {
    while hi - lo > SINGULARITY_BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if g_lo * gm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            g_lo = gm;
        }
    }
    0.5 * (lo + hi)
}

fn push_root(roots: &mut Vec<f64>, r: f64) {
    // A root that straddles a grid point would otherwise be reported twice.
    if roots.last().is_none_or(|&last| (r - last).abs() > 1e-6) {
        roots.push(r);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::test_params;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Oracle-verified constants for the reference arm, q0 = (-pi/2, -pi/3).
    const GAMMA_REF: f64 = -0.7534105749568178;
    const RHO_REF: f64 = 0.5179697702828122;
    const ETA_REF: f64 = -1.8754652945752035;
    const F_AT_MINUS_1: f64 = -1.5832250146142908;
    const SINGULAR_ROOTS_REF: [f64; 3] =
        [-1.3464467027373592, 0.21133966844205063, 2.4010609127547786];

    fn branch4() -> HolonomicBranch {
        let alpha = test_params().alphas();
        HolonomicBranch::new(&alpha, &JointState::at_rest(-PI / 2.0, -PI / 3.0)).unwrap()
    }

    #[test]
    fn fk_zero_configuration() {
        let p = test_params();
        let x = fk(&p, &Vector2::zeros(), &BasePose::from([0.0, 0.0]));
        assert_abs_diff_eq!(x, Vector2::new(0.0, 3.0), epsilon = 1e-15);
    }

    #[test]
    fn fk_reference_pose() {
        // Manipulator 1's initial pose: q = (-pi/2, pi/3) from base (0,0).
        let p = test_params();
        let x = fk(
            &p,
            &Vector2::new(-PI / 2.0, PI / 3.0),
            &BasePose::from([0.0, 0.0]),
        );
        assert_relative_eq!(x[0], 2.25, max_relative = 1e-14);
        assert_relative_eq!(x[1], 1.299038105676658, max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn fk_within_reach(q1 in -7.0f64..7.0, q2 in -7.0f64..7.0, bx in -5.0f64..5.0, by in -5.0f64..5.0) {
            let p = test_params();
            let base = BasePose::from([bx, by]);
            let x = fk(&p, &Vector2::new(q1, q2), &base);
            prop_assert!((x - base.0).norm() <= p.reach() + 1e-12);
        }

        #[test]
        fn constrained_q1_continuous_across_branches(kk in -1i32..=1, eps_exp in -10f64..-7.0) {
            let b = branch4();
            let at = PI + TAU * f64::from(kk);
            let eps = 10f64.powf(eps_exp);
            let jump = (b.constrained_q1(at - eps) - b.constrained_q1(at + eps)).abs();
            prop_assert!(jump <= 1e-6, "jump {jump} at {at}");
        }
    }

    #[test]
    fn jacobian_singular_when_links_aligned() {
        let p = test_params();
        assert_abs_diff_eq!(
            jacobian(&p, &Vector2::new(0.7, 0.0)).determinant(),
            0.0,
            epsilon = 1e-15
        );
        // det J = L1 L2 sin q2 for this sign convention.
        let q = Vector2::new(0.4, 0.7);
        assert_relative_eq!(
            jacobian(&p, &q).determinant(),
            1.5 * 1.5 * 0.7f64.sin(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn jacobian_reference_entries() {
        let p = test_params();
        let j = jacobian(&p, &Vector2::new(0.0, PI / 2.0));
        assert_abs_diff_eq!(j, Matrix2::new(-1.5, 0.0, -1.5, -1.5), epsilon = 1e-15);
    }

    #[test]
    fn jacobian_matches_finite_difference() {
        let p = test_params();
        let base = BasePose::from([0.0, 0.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let h = 1e-6;
        for _ in 0..200 {
            let q = Vector2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let j = jacobian(&p, &q);
            for col in 0..2 {
                let mut qp = q;
                let mut qm = q;
                qp[col] += h;
                qm[col] -= h;
                let fd = (fk(&p, &qp, &base) - fk(&p, &qm, &base)) / (2.0 * h);
                assert_abs_diff_eq!(j.column(col).into_owned(), fd, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn branch_reference_constants() {
        let b = branch4();
        assert_relative_eq!(b.gamma(), GAMMA_REF, max_relative = 1e-14);
        assert_relative_eq!(b.rho(), RHO_REF, max_relative = 1e-14);
        assert_relative_eq!(b.eta(), ETA_REF, max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn branch_constants_in_range(
            m1 in 0.2f64..4.0, m2 in 0.2f64..4.0,
            len1 in 0.4f64..2.5, len2 in 0.4f64..2.5,
            c1 in 0.2f64..1.0, c2 in 0.2f64..1.0,
            i1 in 0.01f64..1.0, i2 in 0.01f64..1.0,
        ) {
            // rho > 0 always; |gamma| < 1 whenever the inertia invariant
            // alpha1 alpha2 > alpha3^2 holds.
            let p = ManipulatorParams::new(m1, m2, i1, i2, len1, len2, len1 * c1, len2 * c2)
                .unwrap();
            let b = HolonomicBranch::new(&p.alphas(), &JointState::at_rest(0.1, 0.2)).unwrap();
            prop_assert!(b.rho() > 0.0);
            prop_assert!(b.gamma().abs() < 1.0);
        }
    }

    #[test]
    fn branch_reproduces_initial_angle() {
        let alpha = test_params().alphas();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..200 {
            let q0 = JointState::at_rest(rng.gen_range(-3.0..3.0), rng.gen_range(-PI..PI));
            let b = HolonomicBranch::new(&alpha, &q0).unwrap();
            assert_abs_diff_eq!(b.constrained_q1(q0.q[1]), q0.q[0], epsilon = 1e-12);
        }
        // Boundary of the admissible initial interval.
        for q20 in [PI, -PI] {
            let q0 = JointState::at_rest(0.37, q20);
            let b = HolonomicBranch::new(&alpha, &q0).unwrap();
            assert_abs_diff_eq!(b.constrained_q1(q20), 0.37, epsilon = 1e-12);
        }
    }

    #[test]
    fn branch_rejects_moving_or_out_of_range_start() {
        let alpha = test_params().alphas();
        assert!(matches!(
            HolonomicBranch::new(&alpha, &JointState::new(0.0, 0.0, 0.1, 0.0)),
            Err(Error::AssumptionViolation(_))
        ));
        assert!(matches!(
            HolonomicBranch::new(&alpha, &JointState::at_rest(0.0, 3.5)),
            Err(Error::BranchDomain(_))
        ));
    }

    #[test]
    fn branch_symmetric_inertia_degenerates_to_line() {
        // alpha1 = alpha2 gives gamma = 0, so f(q2) = -q2/2 + eta.
        let alpha = AlphaParams::new(2.0, 2.0, 0.5).unwrap();
        let q0 = JointState::at_rest(0.3, 0.8);
        let b = HolonomicBranch::new(&alpha, &q0).unwrap();
        assert_eq!(b.gamma(), 0.0);
        for q2 in [-2.0, -0.5, 0.0, 1.3, 2.9] {
            assert_relative_eq!(
                b.constrained_q1(q2),
                -q2 / 2.0 + b.eta(),
                max_relative = 1e-14
            );
        }
    }

    /// Independent oracle: integrate the velocity constraint
    /// dq1/dq2 = -M12(q2)/M11(q2) as an ODE in q2 with fine-step RK4.
    fn ode_constrained_q1(alpha: &AlphaParams, q0: &JointState, q2_target: f64, n: usize) -> f64 {
        let rhs = |q2: f64| {
            let m = alpha.mass_matrix(q2);
            -m[(0, 1)] / m[(0, 0)]
        };
        let h = (q2_target - q0.q[1]) / n as f64;
        let mut q1 = q0.q[0];
        let mut x = q0.q[1];
        for _ in 0..n {
            let k1 = rhs(x);
            let k2 = rhs(x + 0.5 * h);
            let k4 = rhs(x + h);
            q1 += h * (k1 + 4.0 * k2 + k4) / 6.0;
            x += h;
        }
        q1
    }

    #[test]
    fn branch_matches_ode_integration_of_velocity_constraint() {
        let alpha = test_params().alphas();
        let b = branch4();
        let v = b.constrained_q1(-1.0);
        assert_relative_eq!(v, F_AT_MINUS_1, max_relative = 1e-13);
        let ode = ode_constrained_q1(&alpha, &b.initial_state(), -1.0, 20_000);
        assert_abs_diff_eq!(v, ode, epsilon = 1e-8);
        // A second target on the other side of the start.
        let ode2 = ode_constrained_q1(&alpha, &b.initial_state(), 2.0, 40_000);
        assert_abs_diff_eq!(b.constrained_q1(2.0), ode2, epsilon = 1e-8);
    }

    #[test]
    fn branch_continuity_at_pi() {
        let b = branch4();
        let eps = 1e-8;
        assert!((b.constrained_q1(PI - eps) - b.constrained_q1(PI + eps)).abs() <= 1e-6);
        assert!((b.constrained_q1(-PI - eps) - b.constrained_q1(-PI + eps)).abs() <= 1e-6);
    }

    #[test]
    fn reduced_jacobian_is_curve_tangent() {
        // Central finite difference of x(q2) = h(f(q2), q2) along the branch.
        let p = test_params();
        let alpha = p.alphas();
        let b = branch4();
        let base = BasePose::from([0.0, 0.0]);
        let h = 1e-6;
        for i in 0..50 {
            let q2 = -3.0 + 6.0 * (i as f64) / 49.0;
            let x = |t: f64| fk(&p, &Vector2::new(b.constrained_q1(t), t), &base);
            let fd = (x(q2 + h) - x(q2 - h)) / (2.0 * h);
            let jb = reduced_jacobian(&alpha, &p, &Vector2::new(b.constrained_q1(q2), q2));
            assert_abs_diff_eq!(jb, fd, epsilon = 1e-5);
        }
    }

    #[test]
    fn reduced_jacobian_direct_substitution_at_zero() {
        // At q2 = 0 the mass ratio is M12/M11 = 1.875/6.15 for the reference
        // arm; compare against entries assembled by hand.
        let p = test_params();
        let alpha = p.alphas();
        let q = Vector2::new(0.3, 0.0);
        let r = 1.875 / 6.15;
        let j = jacobian(&p, &q);
        let expect = Vector2::new(-j[(0, 0)] * r + j[(0, 1)], -j[(1, 0)] * r + j[(1, 1)]);
        assert_abs_diff_eq!(reduced_jacobian(&alpha, &p, &q), expect, epsilon = 1e-14);
    }

    #[test]
    fn reduced_jacobian_velocity_identity() {
        // For qdot satisfying the constraint, J qdot = Jbar q2dot.
        let p = test_params();
        let alpha = p.alphas();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let q = Vector2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let w = rng.gen_range(-2.0..2.0);
            let m = alpha.mass_matrix(q[1]);
            let qdot = Vector2::new(-m[(0, 1)] / m[(0, 0)] * w, w);
            let full = jacobian(&p, &q) * qdot;
            let reduced = reduced_jacobian(&alpha, &p, &q) * w;
            assert_abs_diff_eq!(full, reduced, epsilon = 1e-12);
        }
    }

    #[test]
    fn augmented_jacobian_structure() {
        let p = test_params();
        let alpha = p.alphas();
        let q = Vector2::new(0.9, -1.4);
        let jb = reduced_jacobian(&alpha, &p, &q);
        let js = augmented_jacobian(&alpha, &p, &q);
        assert_eq!(js[(0, 0)], jb[0]);
        assert_eq!(js[(0, 1)], jb[1]);
        assert_eq!(js[(1, 0)], jb[0]);
        assert_eq!(js[(1, 1)], -jb[1]);
        assert_relative_eq!(js.determinant(), -2.0 * jb[0] * jb[1], max_relative = 1e-12);
    }

    #[test]
    fn augmented_jacobian_near_singular_at_root() {
        // The middle singular angle of the reference branch.
        let p = test_params();
        let alpha = p.alphas();
        let b = branch4();
        let q2 = SINGULAR_ROOTS_REF[1];
        let q = Vector2::new(b.constrained_q1(q2), q2);
        assert!(augmented_jacobian(&alpha, &p, &q).determinant().abs() <= 1e-9);
    }

    #[test]
    fn augmented_jacobian_inverse_roundtrip() {
        let p = test_params();
        let alpha = p.alphas();
        let q = Vector2::new(0.4, 1.1);
        let js = augmented_jacobian(&alpha, &p, &q);
        let inv = js.try_inverse().expect("nonsingular point");
        assert_abs_diff_eq!(js * inv, Matrix2::identity(), epsilon = 1e-12);
    }

    #[test]
    fn singularities_of_reference_branch() {
        let p = test_params();
        let alpha = p.alphas();
        let b = branch4();
        let roots = find_singularities(&alpha, &p, &b, (-PI, PI));
        assert_eq!(roots.len(), 3, "roots: {roots:?}");
        for (got, want) in roots.iter().zip(SINGULAR_ROOTS_REF) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-7);
        }
        // Root residual.
        for &r in &roots {
            let q = Vector2::new(b.constrained_q1(r), r);
            let jb = reduced_jacobian(&alpha, &p, &q);
            assert!((jb[0] * jb[1]).abs() <= 1e-8);
        }
    }

    #[test]
    fn singularities_stable_under_grid_refinement() {
        let p = test_params();
        let alpha = p.alphas();
        let b = branch4();
        let coarse = find_singularities(&alpha, &p, &b, (-PI, PI));
        let fine = find_singularities_with_grid(&alpha, &p, &b, (-PI, PI), 5e-4);
        assert_eq!(coarse.len(), fine.len());
        for (a, bb) in coarse.iter().zip(&fine) {
            assert!((a - bb).abs() <= 1e-6);
        }
    }

    #[test]
    fn singularities_empty_without_sign_change() {
        let p = test_params();
        let alpha = p.alphas();
        let b = branch4();
        // A window between the first two roots where g keeps one sign.
        let roots = find_singularities(&alpha, &p, &b, (-1.2, 0.1));
        assert!(roots.is_empty(), "{roots:?}");
    }
}
