//! Outer DC iteration: linearize the concave correction at the current
//! iterate and solve the resulting weighted-L1 subproblem.
//!
//! At u_k the concave part beta * int j(u) is replaced by its tangent, which
//! turns the step into solve_l1 with tilt q = beta * j'(u_k). A fixed point
//! of that map is exactly a point satisfying the stationarity system of the
//! smoothed objective, which is what the residual below measures.

use std::time::Instant;

use crate::error::SparseOcError;
use crate::grid::{sign, Field};
use crate::pde::{solve_adjoint, solve_state};
use crate::penalty::{cost_j, cost_j_gamma, CostBreakdown};
use crate::problem::ControlProblem;
use crate::subproblem::{
    lipschitz_estimate, solve_l1, stationarity_parts, BoxConstraints, StationarityParts,
};
use crate::Result;

#[derive(Debug, Clone)]
pub struct DcaOptions {
    /// Stationarity target in zeta units (dimensionless).
    pub outer_tol: f64,
    pub max_outer: usize,
    /// Iteration cap for each inner subproblem solve.
    pub max_inner: usize,
    /// Stop when consecutive zeta fields differ by less than this in the
    /// weighted L2 norm; guards against stalling below outer_tol.
    pub zeta_stall_tol: f64,
}

impl Default for DcaOptions {
    fn default() -> Self {
        DcaOptions {
            outer_tol: 1e-6,
            max_outer: 100,
            max_inner: 5000,
            zeta_stall_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    ZetaStalled,
    MaxIterations,
}

#[derive(Debug, Clone, Copy)]
pub struct IterationRecord {
    pub k: usize,
    pub cost: f64,
    pub residual: f64,
    pub zeta_gap: f64,
    pub null_entries: usize,
    pub inner_iterations: usize,
    pub elapsed_seconds: f64,
}

/// Optimality-system diagnostics at the returned point, all nonnegative.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct KKTResiduals {
    /// Worst violation of the gradient equation grad F - beta*w +
    /// beta*delta_gamma*zeta = 0 over nodes not at an active bound, with
    /// zeta taken as sign(u) on the support and clipped to [-1,1] off it.
    pub gradient_eq: f64,
    /// max(|zeta| - 1, 0) over nodes away from active bounds (at an active
    /// bound the raw zeta also carries the bound multiplier).
    pub zeta_bound: f64,
    /// max |zeta - sign(u)| over support nodes away from active bounds.
    pub sign_consistency: f64,
    /// Box case: worst multiplier-times-gap product; zero without bounds.
    pub complementarity: f64,
}

/// Result of an outer solve; shared by the DC algorithm and the primal-dual
/// baseline (which leaves the DC-specific fields unset).
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub u: Field,
    pub y: Field,
    pub phi: Field,
    /// Smoothed-objective breakdown at exit.
    pub cost: CostBreakdown,
    /// Exact L^(1/p) objective breakdown at exit.
    pub cost_exact: CostBreakdown,
    pub iterations: Vec<IterationRecord>,
    pub stop_reason: StopReason,
    pub residual: f64,
    pub converged: bool,
    pub zeta: Option<Field>,
    pub w: Option<Field>,
    pub kkt: Option<KKTResiduals>,
}

/// Stationarity evaluation at a control/state pair.
#[derive(Debug, Clone)]
pub struct StationaritySnapshot {
    /// Governing residual: zeta units when the L1 weight is positive,
    /// gradient units otherwise.
    pub residual: f64,
    pub parts: StationarityParts,
    /// zeta = (beta*w - grad F) / (beta*delta_gamma); sign(u) on the support
    /// and inside [-1, 1] off it at a stationary point.
    pub zeta: Field,
    pub phi: Field,
    pub gradient: Field,
    /// Linear tilt beta * j'(u) that the next subproblem would see.
    pub tilt: Field,
    pub kkt: KKTResiduals,
}

pub fn evaluate_stationarity(
    problem: &ControlProblem,
    u: &Field,
    y: &Field,
    bounds: Option<&BoxConstraints>,
) -> Result<StationaritySnapshot> {
    let params = problem.params();
    let lambda = params.beta * params.delta_gamma();
    let phi = solve_adjoint(problem, y)?;
    let gradient = problem.gradient_from_adjoint(u, &phi)?;
    let tilt = params.w_field(u).scale(params.beta);
    let parts = stationarity_parts(u, &gradient.sub(&tilt), lambda, bounds);
    let governing = parts.governing(bounds.is_some());
    let (residual, zeta) = if lambda > 0.0 {
        (
            governing / lambda,
            tilt.sub(&gradient).scale(1.0 / lambda),
        )
    } else {
        (governing, Field::zeros(u.n()))
    };

    let mut gradient_eq = 0.0f64;
    let mut zeta_bound = 0.0f64;
    let mut sign_consistency = 0.0f64;
    for i in 0..u.len() {
        let ui = u.values()[i];
        let zi = zeta.values()[i];
        let gq = gradient.values()[i] - tilt.values()[i];
        // At active bounds the raw zeta additionally carries the bound
        // multiplier, so |zeta| > 1 is legitimate there; wrong-sign
        // multipliers surface through the complementarity product instead.
        let active = bounds.is_some_and(|b| ui <= b.lower || ui >= b.upper);
        if active {
            continue;
        }
        zeta_bound = zeta_bound.max(zi.abs() - 1.0);
        let s = if ui != 0.0 {
            sign(ui)
        } else {
            zi.clamp(-1.0, 1.0)
        };
        gradient_eq = gradient_eq.max((gq + lambda * s).abs());
        if ui != 0.0 && lambda > 0.0 {
            sign_consistency = sign_consistency.max((zi - sign(ui)).abs());
        }
    }
    let kkt = KKTResiduals {
        gradient_eq,
        zeta_bound: zeta_bound.max(0.0),
        sign_consistency,
        complementarity: parts.complementarity,
    };

    Ok(StationaritySnapshot {
        residual,
        parts,
        zeta,
        phi,
        gradient,
        tilt,
        kkt,
    })
}

/// Number of entries with |u_i| <= tol; tol = 0 counts exact zeros.
pub fn sparsity_count(u: &Field, tol: f64) -> usize {
    u.values().iter().filter(|v| v.abs() <= tol).count()
}

/// Penalty weight above which u = 0 is a local minimum of the exact
/// L^(1/p) objective over the ball ||u||_inf < m:
/// beta_0 = m^((p-1)/p) * ||S*(S f - y_d)||_inf.
pub fn null_beta_threshold(problem: &ControlProblem, m: f64) -> Result<f64> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(SparseOcError::invalid(format!(
            "ball radius must be positive and finite, got {m}"
        )));
    }
    let n = problem.grid().n();
    let y0 = solve_state(problem, &Field::zeros(n))?;
    let phi0 = solve_adjoint(problem, &y0)?;
    let p = problem.params().p();
    Ok(m.powf((p - 1.0) / p) * phi0.linf())
}

pub fn dca_solve(
    problem: &ControlProblem,
    u0: &Field,
    options: &DcaOptions,
) -> Result<SolveReport> {
    let grid = problem.grid();
    if u0.n() != grid.n() {
        return Err(SparseOcError::invalid(
            "starting control does not match the problem grid".to_string(),
        ));
    }
    if !(options.outer_tol > 0.0) || options.max_outer == 0 {
        return Err(SparseOcError::invalid(
            "outer tolerance must be positive and max_outer at least 1".to_string(),
        ));
    }
    let start = Instant::now();
    let params = problem.params();
    let lambda = params.beta * params.delta_gamma();
    let bounds = problem.box_constraints();
    let lipschitz = lipschitz_estimate(problem)?;

    let mut u = match bounds {
        Some(b) => u0.map(|v| b.project(v)),
        None => u0.clone(),
    };
    let mut y = solve_state(problem, &u)?;
    let mut snap = evaluate_stationarity(problem, &u, &y, bounds)?;
    let mut residual = snap.residual;
    let mut zeta = snap.zeta.clone();

    let mut records = vec![IterationRecord {
        k: 0,
        cost: cost_j_gamma(problem, &u, &y).total,
        residual,
        zeta_gap: 0.0,
        null_entries: sparsity_count(&u, 0.0),
        inner_iterations: 0,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    }];

    let mut reason = StopReason::MaxIterations;
    if residual <= options.outer_tol {
        reason = StopReason::Converged;
    } else {
        for k in 1..=options.max_outer {
            // residual is in zeta units when lambda > 0, so the factor
            // lambda converts the target back to gradient units for the
            // inner solver. At lambda = 0 the floor applies and the single
            // smooth solve runs to full depth.
            let inner_tol = (0.1 * residual * lambda).max(1e-10);
            let sub = solve_l1(
                problem,
                &snap.tilt,
                &u,
                inner_tol,
                options.max_inner,
                bounds,
                lipschitz,
            )?;
            u = sub.u;
            y = sub.state;
            let cost = cost_j_gamma(problem, &u, &y).total;
            if !cost.is_finite() {
                return Err(SparseOcError::NonFinite(format!(
                    "objective at outer step {k}"
                )));
            }
            let prev_cost = records.last().map(|r| r.cost).unwrap_or(f64::INFINITY);
            if cost > prev_cost + 10.0 * inner_tol + 1e-12 * prev_cost.abs() {
                eprintln!(
                    "warning: objective rose at outer step {k}: {prev_cost:.12e} -> {cost:.12e}"
                );
            }

            snap = evaluate_stationarity(problem, &u, &y, bounds)?;
            let zeta_gap = grid.norm_l2(&snap.zeta.sub(&zeta));
            residual = snap.residual;
            zeta = snap.zeta.clone();

            records.push(IterationRecord {
                k,
                cost,
                residual,
                zeta_gap,
                null_entries: sparsity_count(&u, 0.0),
                inner_iterations: sub.inner_iterations,
                elapsed_seconds: start.elapsed().as_secs_f64(),
            });

            if residual <= options.outer_tol {
                reason = StopReason::Converged;
                break;
            }
            // With beta = 0 the zeta field is identically zero, so the stall
            // guard only applies when the L1 weight is positive.
            if lambda > 0.0 && zeta_gap < options.zeta_stall_tol {
                reason = StopReason::ZetaStalled;
                break;
            }
        }
    }

    let cost = cost_j_gamma(problem, &u, &y);
    let cost_exact = cost_j(problem, &u, &y);
    let w = if params.beta > 0.0 {
        snap.tilt.scale(1.0 / params.beta)
    } else {
        Field::zeros(grid.n())
    };
    Ok(SolveReport {
        u,
        y,
        phi: snap.phi,
        cost,
        cost_exact,
        iterations: records,
        stop_reason: reason,
        residual,
        converged: reason == StopReason::Converged,
        zeta: Some(zeta),
        w: Some(w),
        kkt: Some(snap.kkt),
    })
}
