//! Formation-graph machinery: incidence matrix, edge displacements and
//! squared-distance errors, the formation potential and its gradient, and a
//! numeric infinitesimal-rigidity rank test.

use nalgebra::{DMatrix, Vector2};

use crate::error::{Error, Result};

/// Desired formation: an ordered edge list over agents `1..=n_agents`
/// (1-based, matching scenario files) with one desired distance per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct FormationSpec {
    n_agents: usize,
    edges: Vec<(usize, usize)>,
    d_star: Vec<f64>,
}

impl FormationSpec {
    pub fn new(n_agents: usize, edges: Vec<(usize, usize)>, d_star: Vec<f64>) -> Result<Self> {
        if n_agents == 0 {
            return Err(Error::InvalidFormation("no agents".into()));
        }
        if edges.len() != d_star.len() {
            return Err(Error::InvalidFormation(format!(
                "{} edges but {} desired distances",
                edges.len(),
                d_star.len()
            )));
        }
        for (k, &(tail, head)) in edges.iter().enumerate() {
            if tail == head {
                return Err(Error::InvalidFormation(format!(
                    "edge {} is a self-loop",
                    k + 1
                )));
            }
            if tail < 1 || tail > n_agents || head < 1 || head > n_agents {
                return Err(Error::InvalidFormation(format!(
                    "edge {} references vertex outside 1..={n_agents}",
                    k + 1
                )));
            }
        }
        for (k, &d) in d_star.iter().enumerate() {
            if !d.is_finite() || d <= 0.0 {
                return Err(Error::InvalidFormation(format!(
                    "desired distance {} must be finite and positive, got {d}",
                    k + 1
                )));
            }
        }
        Ok(Self {
            n_agents,
            edges,
            d_star,
        })
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Ordered edges as declared, 1-based (tail, head).
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn d_star(&self) -> &[f64] {
        &self.d_star
    }

    /// Edge indices incident to agent `i` (0-based agent index).
    pub fn incident_edges(&self, i: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, &(t, h))| t - 1 == i || h - 1 == i)
            .map(|(k, _)| k)
            .collect()
    }

    /// N x |E| incidence matrix: +1 at the tail, -1 at the head.
    pub fn incidence_matrix(&self) -> DMatrix<f64> {
        let mut b = DMatrix::zeros(self.n_agents, self.edges.len());
        for (k, &(tail, head)) in self.edges.iter().enumerate() {
            b[(tail - 1, k)] = 1.0;
            b[(head - 1, k)] = -1.0;
        }
        b
    }

    /// Relative displacements `z_k = x_tail - x_head` and squared-distance
    /// errors `e_k = |z_k|^2 - d_k^2`.
    pub fn edge_state(&self, x: &[Vector2<f64>]) -> EdgeState {
        assert_eq!(x.len(), self.n_agents, "positions/agents mismatch");
        let mut z = Vec::with_capacity(self.edges.len());
        let mut e = Vec::with_capacity(self.edges.len());
        for (&(tail, head), &d) in self.edges.iter().zip(&self.d_star) {
            let zk = x[tail - 1] - x[head - 1];
            z.push(zk);
            e.push(zk.norm_squared() - d * d);
        }
        EdgeState { z, e }
    }

    /// Gradient of the potential with respect to each agent position:
    /// `ehat_i = sum_k b_ik 2 z_k e_k`. Each agent's slot accumulates only
    /// its incident edges, in declaration order.
    pub fn gradient(&self, x: &[Vector2<f64>]) -> Vec<Vector2<f64>> {
        let es = self.edge_state(x);
        self.gradient_from_edges(&es)
    }

    pub fn gradient_from_edges(&self, es: &EdgeState) -> Vec<Vector2<f64>> {
        let mut grad = vec![Vector2::zeros(); self.n_agents];
        for (k, &(tail, head)) in self.edges.iter().enumerate() {
            let pull = 2.0 * es.e[k] * es.z[k];
            grad[tail - 1] += pull;
            grad[head - 1] -= pull;
        }
        grad
    }

    /// Jacobian of the edge function (rows `2 z_k^T` placed per incidence),
    /// the matrix whose rank certifies infinitesimal rigidity.
    pub fn rigidity_matrix(&self, x: &[Vector2<f64>]) -> DMatrix<f64> {
        let es = self.edge_state(x);
        let mut r = DMatrix::zeros(self.edges.len(), 2 * self.n_agents);
        for (k, &(tail, head)) in self.edges.iter().enumerate() {
            let row = 2.0 * es.z[k];
            r[(k, 2 * (tail - 1))] = row[0];
            r[(k, 2 * (tail - 1) + 1)] = row[1];
            r[(k, 2 * (head - 1))] = -row[0];
            r[(k, 2 * (head - 1) + 1)] = -row[1];
        }
        r
    }

    /// Numeric rank of the rigidity matrix (singular values above
    /// `1e-9 * sigma_max`). A planar framework is infinitesimally rigid when
    /// this equals `2 N - 3`.
    pub fn rigidity_rank(&self, x: &[Vector2<f64>]) -> usize {
        if self.edges.is_empty() {
            return 0;
        }
        let r = self.rigidity_matrix(x);
        let svd = r.svd(false, false);
        let smax = svd.singular_values.max();
        if smax == 0.0 {
            return 0;
        }
        svd.singular_values
            .iter()
            .filter(|&&s| s > 1e-9 * smax)
            .count()
    }
}

/// Per-edge displacements and squared-distance errors at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeState {
    pub z: Vec<Vector2<f64>>,
    pub e: Vec<f64>,
}

/// Formation potential `V(e) = sum e_k^2 / 2`.
pub fn potential(e: &[f64]) -> f64 {
    0.5 * e.iter().map(|v| v * v).sum::<f64>()
}
