//! Primal-dual baseline: a lagged-diffusivity iteration for the same
//! tracking problem with an epsilon-regularized L^(1/p) term and a
//! grad-squared control penalty.
//!
//! With E the elliptic stencil, the scheme iterates on the coupled system
//!
//!   row 1:  E u + D_k u + alpha u + phi = 0
//!   row 2:  E phi = y - y_d   (adjoint-consistent)  or  E phi - y = y_d
//!   row 3:  E y  = u + f
//!
//! where D_k = diag((beta/p) / max(eps^(2-1/p), |u_k|^(2-1/p))) linearizes
//! the regularized penalty derivative at the previous iterate. Eliminating
//! phi and y gives one SPD equation per sweep,
//!
//!   (E + D_k + alpha I + E^{-2}) u = sigma E^{-1} y_d - E^{-2} f,
//!
//! solved by a fixed-point iteration on the E^{-2} term, which contracts at
//! rate about 1/lambda_min(E)^3. phi and y are then recovered by stencil
//! applications, so row 3 holds to solver accuracy.

use std::time::Instant;

use crate::dca::{IterationRecord, SolveReport, StopReason};
use crate::error::SparseOcError;
use crate::grid::Field;
use crate::pde::{pcg, solve_state, CG_REL_TOL};
use crate::penalty::{cost_j, cost_j_gamma};
use crate::problem::{ControlPenalty, ControlProblem};
use crate::Result;

/// Which sign convention row 2 uses. The two variants produce controls that
/// are exact mirror images (u -> -u); `AsPrinted` is the default, while
/// `AdjointConsistent` matches the adjoint convention of the DC solver and
/// is what comparisons should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Row2Sign {
    AsPrinted,
    AdjointConsistent,
}

#[derive(Debug, Clone)]
pub struct PdParams {
    /// Regularization floor of the penalty derivative, must be positive.
    pub epsilon: f64,
    pub row2_sign: Row2Sign,
    /// Stop when the relative control change drops below this.
    pub tol: f64,
    pub max_outer: usize,
    /// Relative tolerance of the inner fixed-point elimination.
    pub fixed_point_tol: f64,
    pub max_fixed_point: usize,
}

impl Default for PdParams {
    fn default() -> Self {
        PdParams {
            epsilon: 1e-4,
            row2_sign: Row2Sign::AsPrinted,
            tol: 1e-10,
            max_outer: 100,
            fixed_point_tol: 1e-12,
            max_fixed_point: 50,
        }
    }
}

/// Regularized penalty integrand: |t|^(1/p) outside [-eps, eps], a matched
/// parabola plus constant inside.
pub fn pd_regularized_integrand(p: f64, epsilon: f64, t: f64) -> f64 {
    let a = t.abs();
    if a >= epsilon {
        a.powf(1.0 / p)
    } else {
        a * a / (2.0 * p * epsilon.powf(2.0 - 1.0 / p))
            + epsilon.powf(1.0 / p) * (1.0 - 1.0 / (2.0 * p))
    }
}

/// sup_t (|t|^(1/p) - huber_smoothed(t)) = (1 - 1/p) * (p*gamma)^(-1/p),
/// attained at t = 1/(p*gamma).
pub fn huber_sup_gap(p: f64, gamma: f64) -> f64 {
    (1.0 - 1.0 / p) * (p * gamma).powf(-1.0 / p)
}

/// Inverse of `huber_sup_gap` in gamma.
pub fn gamma_for_gap(p: f64, gap: f64) -> f64 {
    ((1.0 - 1.0 / p) / gap).powf(p) / p
}

/// sup_t (pd_regularized_integrand(t) - |t|^(1/p)) = (1 - 1/(2p)) * eps^(1/p),
/// attained at t = 0.
pub fn pd_sup_gap(p: f64, epsilon: f64) -> f64 {
    (1.0 - 1.0 / (2.0 * p)) * epsilon.powf(1.0 / p)
}

/// Inverse of `pd_sup_gap` in epsilon.
pub fn epsilon_for_gap(p: f64, gap: f64) -> f64 {
    (gap / (1.0 - 1.0 / (2.0 * p))).powf(p)
}

fn diffusivity_diag(u: &Field, p: f64, beta: f64, epsilon: f64) -> Vec<f64> {
    let floor = epsilon.powf(2.0 - 1.0 / p);
    u.values()
        .iter()
        .map(|&v| (beta / p) / floor.max(v.abs().powf(2.0 - 1.0 / p)))
        .collect()
}

pub fn pd_solve(problem: &ControlProblem, u0: &Field, params: &PdParams) -> Result<SolveReport> {
    let grid = problem.grid();
    let n = grid.n();
    if u0.n() != n {
        return Err(SparseOcError::invalid(
            "starting control does not match the problem grid".to_string(),
        ));
    }
    if !(params.epsilon > 0.0) || !params.epsilon.is_finite() {
        return Err(SparseOcError::invalid(format!(
            "epsilon must be positive, got {}",
            params.epsilon
        )));
    }
    if problem.control_penalty() != ControlPenalty::GradSquared {
        return Err(SparseOcError::invalid(
            "the primal-dual scheme solves the 1/2 |grad u|^2 control cost; \
             set the gradient-energy control penalty on the problem",
        ));
    }
    if problem.box_constraints().is_some() {
        return Err(SparseOcError::invalid(
            "the primal-dual scheme does not support box constraints",
        ));
    }
    let start = Instant::now();
    let op = problem.operator();
    let pp = problem.params();
    let (p, alpha, beta) = (pp.p(), pp.alpha, pp.beta);
    let sigma = match params.row2_sign {
        Row2Sign::AsPrinted => -1.0,
        Row2Sign::AdjointConsistent => 1.0,
    };

    // Fixed right-hand side sigma * E^{-1} y_d - E^{-2} f.
    let (einv_yd, _) = op.solve(problem.y_d(), CG_REL_TOL)?;
    let mut rhs = einv_yd.scale(sigma);
    if problem.f().linf() != 0.0 {
        let (e1, _) = op.solve(problem.f(), CG_REL_TOL)?;
        let (e2, _) = op.solve(&e1, CG_REL_TOL)?;
        rhs = rhs.axpy(-1.0, &e2);
    }

    let h = grid.h();
    let stencil_diag = 4.0 / (h * h);
    let cg_max = 60 * (n + 2);

    let recover = |u: &Field, diag: &[f64]| -> (Field, Field) {
        // phi = -(E + D + alpha I) u, then y = E phi + sigma * y_d.
        let eu = op.apply(u);
        let phi = Field::from_values(
            n,
            eu.values()
                .iter()
                .zip(u.values())
                .zip(diag)
                .map(|((e, v), d)| -(e + (d + alpha) * v))
                .collect(),
        )
        .expect("length preserved");
        let y = op.apply(&phi).axpy(sigma, problem.y_d());
        (phi, y)
    };

    let mut u = u0.clone();
    let y_start = solve_state(problem, &u)?;
    let mut records = vec![IterationRecord {
        k: 0,
        cost: cost_j(problem, &u, &y_start).total,
        residual: f64::INFINITY,
        zeta_gap: 0.0,
        null_entries: crate::dca::sparsity_count(&u, 0.0),
        inner_iterations: 0,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    }];
    let mut reason = StopReason::MaxIterations;
    let mut residual = f64::INFINITY;

    for k in 1..=params.max_outer {
        let diag = diffusivity_diag(&u, p, beta, params.epsilon);
        let apply_shifted = |v: &Field| -> Field {
            let ev = op.apply(v);
            Field::from_values(
                n,
                ev.values()
                    .iter()
                    .zip(v.values())
                    .zip(&diag)
                    .map(|((e, x), d)| e + (d + alpha) * x)
                    .collect(),
            )
            .expect("length preserved")
        };

        // Solve (E + D + alpha I + E^{-2}) u_new = rhs by lagging the
        // E^{-2} term, which is tiny relative to the rest.
        let mut u_new = u.clone();
        let mut fixed_point_passes = 0usize;
        for _ in 0..params.max_fixed_point {
            fixed_point_passes += 1;
            let (e1, _) = op.solve(&u_new, CG_REL_TOL)?;
            let (e2, _) = op.solve(&e1, CG_REL_TOL)?;
            let b = rhs.sub(&e2);
            let (next, _) = pcg(
                &apply_shifted,
                |i| 1.0 / (stencil_diag + diag[i] + alpha),
                &b,
                CG_REL_TOL,
                cg_max,
                "cg(pd)",
            )?;
            let change = next.sub(&u_new).linf();
            let scale = next.linf().max(1e-300);
            u_new = next;
            if change <= params.fixed_point_tol * scale {
                break;
            }
        }
        if !u_new.is_finite() {
            return Err(SparseOcError::NonFinite(format!(
                "primal-dual iterate at step {k}"
            )));
        }

        let diff = u_new.sub(&u);
        let denom = grid.norm_l2(&u).max(1e-300);
        residual = grid.norm_l2(&diff) / denom;
        u = u_new;

        let diag_now = diffusivity_diag(&u, p, beta, params.epsilon);
        let (_, y) = recover(&u, &diag_now);
        records.push(IterationRecord {
            k,
            cost: cost_j(problem, &u, &y).total,
            residual,
            zeta_gap: 0.0,
            null_entries: crate::dca::sparsity_count(&u, 0.0),
            inner_iterations: fixed_point_passes,
            elapsed_seconds: start.elapsed().as_secs_f64(),
        });

        if residual <= params.tol {
            reason = StopReason::Converged;
            break;
        }
    }

    let diag_final = diffusivity_diag(&u, p, beta, params.epsilon);
    let (phi, y) = recover(&u, &diag_final);
    let cost = cost_j_gamma(problem, &u, &y);
    let cost_exact = cost_j(problem, &u, &y);
    Ok(SolveReport {
        u,
        y,
        phi,
        cost,
        cost_exact,
        iterations: records,
        stop_reason: reason,
        residual,
        converged: reason == StopReason::Converged,
        zeta: None,
        w: None,
        kkt: None,
    })
}

/// Finds the pair `(gamma, epsilon)` at which both regularizations reach the
/// same worst-case penalty error `target_re` per unit area.
///
/// Inverts the closed forms of [`huber_sup_gap`] and [`pd_sup_gap`], so the
/// returned parameters satisfy `huber_sup_gap(p, gamma) == target_re` and
/// `pd_sup_gap(p, epsilon) == target_re` up to floating-point rounding.
pub fn match_regularization(p: f64, target_re: f64) -> Result<(f64, f64)> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(SparseOcError::invalid(
            "match_regularization requires finite p > 1",
        ));
    }
    if !(target_re > 0.0) || !target_re.is_finite() {
        return Err(SparseOcError::invalid(
            "match_regularization requires finite target_re > 0",
        ));
    }
    Ok((gamma_for_gap(p, target_re), epsilon_for_gap(p, target_re)))
}
