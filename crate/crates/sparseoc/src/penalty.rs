//! The L^(1/p) sparsity penalty, its Huber-type smoothing, and the DC
//! (difference-of-convex) decomposition used by the outer algorithm.
//!
//! The exact penalty integrand is |u|^(1/p). The smoothing replaces |u| by a
//! Huber function h with corner parameter 1/gamma before taking the p-th
//! root, which makes the integrand linear with slope delta_gamma on
//! [-1/gamma, 1/gamma] and leaves it within O(1/gamma) of |u|^(1/p) outside.
//! That linear core is what the DC split peels off:
//!
//!   h(v)^(1/p) = delta_gamma * |v| - j(v),   j >= 0, j == 0 near zero.

use crate::error::SparseOcError;
use crate::grid::{sign, Field, Grid};
use crate::problem::{ControlPenalty, ControlProblem};
use crate::Result;

/// Parameters of the regularized objective: exponent p, smoothing gamma,
/// quadratic weight alpha, penalty weight beta.
#[derive(Debug, Clone, Copy)]
pub struct PenaltyParams {
    p: f64,
    gamma: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl PenaltyParams {
    pub fn new(p: f64, gamma: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(SparseOcError::invalid(format!("p must be >= 1, got {p}")));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(SparseOcError::invalid(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(SparseOcError::invalid(format!(
                "alpha must be >= 0, got {alpha}"
            )));
        }
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(SparseOcError::invalid(format!(
                "beta must be >= 0, got {beta}"
            )));
        }
        Ok(PenaltyParams {
            p,
            gamma,
            alpha,
            beta,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        PenaltyParams::new(self.p, gamma, self.alpha, self.beta)
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        PenaltyParams::new(self.p, self.gamma, self.alpha, beta)
    }

    /// Slope of the smoothed integrand on the linear core:
    /// gamma^((p-1)/p) / p^(1/p).
    pub fn delta_gamma(&self) -> f64 {
        self.gamma.powf((self.p - 1.0) / self.p) / self.p.powf(1.0 / self.p)
    }

    /// Huber function applied to |v|. Quadratic-power branch below the corner
    /// at 1/gamma, affine above; both branches meet at 1/(gamma*p).
    ///
    /// The inner branch is written as (gamma*|v|)^p / (gamma*p) so the
    /// powf argument stays O(1) even for gamma around 1e8.
    pub fn huber(&self, v: f64) -> f64 {
        let a = v.abs();
        if a <= 1.0 / self.gamma {
            (self.gamma * a).powf(self.p) / (self.gamma * self.p)
        } else {
            a + (1.0 - self.p) / (self.p * self.gamma)
        }
    }

    /// Smoothed penalty integrand h(v)^(1/p).
    pub fn integrand(&self, v: f64) -> f64 {
        self.huber(v).max(0.0).powf(1.0 / self.p)
    }

    /// Concave correction of the DC split: j(v) = delta_gamma*|v| - h(v)^(1/p).
    /// Identically zero on the linear core, positive and increasing outside,
    /// with slope approaching delta_gamma as |v| grows.
    pub fn j_value(&self, z: f64) -> f64 {
        let a = z.abs();
        if a <= 1.0 / self.gamma {
            0.0
        } else {
            let inner = a + (1.0 - self.p) / (self.p * self.gamma);
            self.delta_gamma() * a - inner.powf(1.0 / self.p)
        }
    }

    /// Derivative of j. C^1 across the corner: both one-sided limits are 0.
    pub fn j_prime(&self, z: f64) -> f64 {
        let a = z.abs();
        if a <= 1.0 / self.gamma {
            0.0
        } else {
            let inner = a + (1.0 - self.p) / (self.p * self.gamma);
            (self.delta_gamma() - inner.powf((1.0 - self.p) / self.p) / self.p) * sign(z)
        }
    }

    /// Pointwise j'(u), the linearization weight field of the outer loop.
    pub fn w_field(&self, u: &Field) -> Field {
        u.map(|z| self.j_prime(z))
    }

    /// Exact penalty integral: int |u|^(1/p).
    pub fn upsilon_p(&self, grid: &Grid, u: &Field) -> f64 {
        grid.integrate(&u.map(|v| v.abs().powf(1.0 / self.p)))
    }

    /// Smoothed penalty integral: int h(u)^(1/p).
    pub fn upsilon_p_gamma(&self, grid: &Grid, u: &Field) -> f64 {
        grid.integrate(&u.map(|v| self.integrand(v)))
    }
}

/// Additive pieces of the objective at a control/state pair.
///
/// `sparsity` is the beta-weighted penalty integral: the smoothed one for
/// `cost_j_gamma`, the exact L^(1/p) one for `cost_j`. `gradient_energy` is
/// zero unless the problem charges 1/2 * int |grad u|^2.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct CostBreakdown {
    pub tracking: f64,
    pub tikhonov: f64,
    pub gradient_energy: f64,
    pub sparsity: f64,
    pub total: f64,
}

fn breakdown(problem: &ControlProblem, u: &Field, y: &Field, sparsity: f64) -> CostBreakdown {
    let grid = problem.grid();
    let tracking = 0.5 * grid.norm_l2_sq(&y.sub(problem.y_d()));
    let tikhonov = 0.5 * problem.params().alpha * grid.norm_l2_sq(u);
    let gradient_energy = match problem.control_penalty() {
        ControlPenalty::Tikhonov => 0.0,
        ControlPenalty::GradSquared => problem.dirichlet_energy(u),
    };
    CostBreakdown {
        tracking,
        tikhonov,
        gradient_energy,
        sparsity,
        total: tracking + tikhonov + gradient_energy + sparsity,
    }
}

/// Exact objective J(u) with the L^(1/p) penalty, at a known state y.
pub fn cost_j(problem: &ControlProblem, u: &Field, y: &Field) -> CostBreakdown {
    let params = problem.params();
    let sparsity = params.beta * params.upsilon_p(problem.grid(), u);
    breakdown(problem, u, y, sparsity)
}

/// Smoothed objective J_gamma(u) the solvers minimize, at a known state y.
pub fn cost_j_gamma(problem: &ControlProblem, u: &Field, y: &Field) -> CostBreakdown {
    let params = problem.params();
    let sparsity = params.beta * params.upsilon_p_gamma(problem.grid(), u);
    breakdown(problem, u, y, sparsity)
}

/// Convex part of the DC split: smooth cost plus the weighted L1 term
/// beta * delta_gamma * ||u||_1.
pub fn dc_g_value(problem: &ControlProblem, u: &Field, y: &Field) -> f64 {
    let params = problem.params();
    problem.smooth_cost(u, y) + params.beta * params.delta_gamma() * problem.grid().norm_l1(u)
}

/// Concave part (entering with a minus sign): beta * int j(u).
pub fn dc_h_value(problem: &ControlProblem, u: &Field) -> f64 {
    let grid = problem.grid();
    let params = problem.params();
    params.beta * grid.integrate(&u.map(|z| params.j_value(z)))
}
