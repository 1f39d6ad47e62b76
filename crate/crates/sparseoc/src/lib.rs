//! Sparse optimal control of elliptic PDEs.
//!
//! Solves
//!
//! ```text
//!     min  1/2 ||y - y_d||^2  +  alpha/2 ||u||^2  +  beta * int |u|^(1/p)
//!     s.t. A y = u + f  on the unit square,  y = 0 on the boundary,
//!          (optionally)  ua <= u <= ub
//! ```
//!
//! for p >= 1. The nonconvex, non-Lipschitz integral term is handled by a
//! Huber-type minorant and a difference-of-convex (DC) splitting; the convex
//! inner subproblems are L1-penalized least squares solved by proximal
//! gradient iteration. A primal-dual reweighting scheme is included as a
//! comparison baseline, along with an experiment harness and a small CLI.
//!
//! Module map:
//! - [`grid`]: uniform interior lattice on (0,1)^2, node fields, quadrature
//! - [`pde`]: 5-point elliptic operator, CG solver, state/adjoint solves
//! - [`penalty`]: Huber-type penalty, DC pieces G and H, cost evaluation
//! - [`subproblem`]: inner L1 solver (proximal gradient with restarts)
//! - [`dca`]: outer DC iteration, stationarity measures, reports
//! - [`pd`]: primal-dual baseline and regularization matching
//! - [`harness`]: named experiment setups, sweeps, CSV/JSON output

pub mod dca;
pub mod error;
pub mod grid;
pub mod harness;
pub mod pd;
pub mod pde;
pub mod penalty;
pub mod problem;
pub mod report;
pub mod subproblem;

pub use dca::{
    dca_solve, null_beta_threshold, DcaOptions, IterationRecord, KKTResiduals, SolveReport,
    StopReason,
};
pub use error::SparseOcError;
pub use grid::{Field, Grid, QuadratureRule};
pub use harness::{build_example, run, Algorithm, ExampleKind, RunConfig};
pub use pd::{match_regularization, pd_solve, PdParams, Row2Sign};
pub use pde::{solve_adjoint, solve_state, AssembledOperator, EllipticOperatorSpec, OperatorKind};
pub use penalty::{cost_j, cost_j_gamma, CostBreakdown, PenaltyParams};
pub use problem::{ControlPenalty, ControlProblem};
pub use subproblem::{project_box, soft_threshold, solve_l1, BoxConstraints, SubproblemResult};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, SparseOcError>;
