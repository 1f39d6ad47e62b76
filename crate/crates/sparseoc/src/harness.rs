//! Named experiment setups, parameter sweeps, and the run driver behind the
//! command-line interface.
//!
//! A [`RunConfig`] (JSON file or flag overrides) selects one of the built-in
//! examples, the algorithm, and the solver knobs. [`run`] then produces, in
//! the configured output directory:
//!
//! - `iterations.csv` with one row per outer iteration,
//! - `summary.json` with a config echo, cost breakdowns, convergence and
//!   sparsity statistics,
//! - `u.csv`, `y.csv`, `phi.csv` field dumps,
//! - for sweeps, `sweep.csv` plus per-entry subdirectories `sweep_<idx>/`,
//! - for the comparison example, `comparison.csv` plus `dca/` and `pd/`
//!   subdirectories.
//!
//! Runs are deterministic: identical configs produce identical files except
//! for the `elapsed_seconds` column of `iterations.csv`.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dca::{dca_solve, sparsity_count, DcaOptions, SolveReport};
use crate::error::SparseOcError;
use crate::grid::{Field, Grid, QuadratureRule};
use crate::pd::{epsilon_for_gap, huber_sup_gap, pd_solve, PdParams, Row2Sign};
use crate::pde::EllipticOperatorSpec;
use crate::penalty::PenaltyParams;
use crate::problem::{ControlPenalty, ControlProblem};
use crate::report::{write_comparison_csv, write_solve_outputs, write_sweep_csv, SweepRow};
use crate::subproblem::BoxConstraints;
use crate::Result;

/// Loose threshold for the secondary near-zero count in summaries; the
/// primary count is always of exact zeros.
pub const NEAR_NULL_TOL: f64 = 1e-3;

/// Built-in problem setups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleKind {
    /// Tracking target exp(-cos(2 pi x y)^2 / 0.1), Tikhonov control cost.
    Example1,
    /// Same target with the 1/2 |grad u|^2 control cost; runs both
    /// algorithms and emits a joint cost table.
    Example2Comparison,
    /// Tracking target sin(2 pi x) sin(2 pi y) with box constraints.
    Example3Box,
    /// Zero target and zero source; data supplied by the caller via config
    /// overrides, useful as a neutral shell.
    Custom,
}

impl FromStr for ExampleKind {
    type Err = SparseOcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "example1" => Ok(ExampleKind::Example1),
            "example2_comparison" => Ok(ExampleKind::Example2Comparison),
            "example3_box" => Ok(ExampleKind::Example3Box),
            "custom" => Ok(ExampleKind::Custom),
            _ => Err(SparseOcError::invalid(format!(
                "unknown example '{s}' (expected example1, example2_comparison, example3_box, or custom)"
            ))),
        }
    }
}

/// Which solver runs a non-comparison example.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Dca,
    Pd,
}

impl FromStr for Algorithm {
    type Err = SparseOcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dca" => Ok(Algorithm::Dca),
            "pd" => Ok(Algorithm::Pd),
            _ => Err(SparseOcError::invalid(format!(
                "unknown algorithm '{s}' (expected dca or pd)"
            ))),
        }
    }
}

/// Parameter a sweep varies while the rest of the config stays fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Alpha,
    Beta,
    Gamma,
    P,
}

impl FromStr for SweepParam {
    type Err = SparseOcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha" => Ok(SweepParam::Alpha),
            "beta" => Ok(SweepParam::Beta),
            "gamma" => Ok(SweepParam::Gamma),
            "p" => Ok(SweepParam::P),
            _ => Err(SparseOcError::invalid(format!(
                "unknown sweep parameter '{s}' (expected alpha, beta, gamma, or p)"
            ))),
        }
    }
}

/// A one-parameter sweep: solve once per value, report one row per solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

/// Full description of one harness run; JSON config files mirror this
/// struct field for field.
///
/// `alpha` and `beta` default per example when omitted; every other field
/// has a global default. `seed` is echoed into the summary for provenance
/// but unused by the solvers, which are deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub example: ExampleKind,
    pub n: usize,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: f64,
    pub p: f64,
    #[serde(rename = "box")]
    pub box_bounds: Option<(f64, f64)>,
    pub algorithm: Algorithm,
    pub outer_tol: f64,
    pub max_outer: usize,
    pub sweep: Option<SweepSpec>,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            example: ExampleKind::Example1,
            n: 31,
            alpha: None,
            beta: None,
            gamma: 1000.0,
            p: 2.0,
            box_bounds: None,
            algorithm: Algorithm::Dca,
            outer_tol: 1e-6,
            max_outer: 100,
            sweep: None,
            output_dir: PathBuf::from("out"),
            seed: 0,
        }
    }
}

impl RunConfig {
    /// Reads a config from a JSON file; missing fields take defaults,
    /// unknown fields are rejected.
    pub fn from_json_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Fills the per-example `alpha`/`beta` defaults and the default box of
    /// the box-constrained example, then validates all parameter ranges.
    pub fn normalized(&self) -> Result<RunConfig> {
        let mut c = self.clone();
        let (alpha_default, beta_default) = match c.example {
            ExampleKind::Example1 => (0.25, 0.001),
            ExampleKind::Example2Comparison => (0.0, 0.005),
            ExampleKind::Example3Box => (0.0, 2e-4),
            ExampleKind::Custom => (0.0, 0.0),
        };
        let alpha = *c.alpha.get_or_insert(alpha_default);
        let beta = *c.beta.get_or_insert(beta_default);
        if c.example == ExampleKind::Example3Box && c.box_bounds.is_none() {
            c.box_bounds = Some((-0.035, 0.035));
        }

        if c.n < 1 {
            return Err(SparseOcError::invalid("n must be >= 1"));
        }
        if !(c.gamma > 0.0) || !c.gamma.is_finite() {
            return Err(SparseOcError::invalid("gamma must be positive and finite"));
        }
        if !(c.p >= 1.0) || !c.p.is_finite() {
            return Err(SparseOcError::invalid("p must be >= 1 and finite"));
        }
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(SparseOcError::invalid("alpha must be >= 0 and finite"));
        }
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(SparseOcError::invalid("beta must be >= 0 and finite"));
        }
        if !(c.outer_tol > 0.0) || !c.outer_tol.is_finite() {
            return Err(SparseOcError::invalid(
                "outer_tol must be positive and finite",
            ));
        }
        if c.max_outer < 1 {
            return Err(SparseOcError::invalid("max_outer must be >= 1"));
        }
        if let Some((lo, hi)) = c.box_bounds {
            BoxConstraints::new(lo, hi)?;
        }
        if let Some(sweep) = &c.sweep {
            if sweep.values.is_empty() {
                return Err(SparseOcError::invalid("sweep.values must be non-empty"));
            }
            for &v in &sweep.values {
                let ok = v.is_finite()
                    && match sweep.param {
                        SweepParam::Alpha => v >= 0.0,
                        SweepParam::Beta => v >= 0.0,
                        SweepParam::Gamma => v > 0.0,
                        SweepParam::P => v >= 1.0,
                    };
                if !ok {
                    return Err(SparseOcError::invalid(format!(
                        "sweep value {v} is out of range for {:?}",
                        sweep.param
                    )));
                }
            }
        }
        Ok(c)
    }
}

/// Tracking target of the first experiment: exp(-cos(2 pi x y)^2 / 0.1).
pub fn tracking_target_example1(x: f64, y: f64) -> f64 {
    let c = (2.0 * std::f64::consts::PI * x * y).cos();
    (-c * c / 0.1).exp()
}

/// Tracking target of the box-constrained experiment:
/// sin(2 pi x) sin(2 pi y).
pub fn tracking_target_example3(x: f64, y: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    (two_pi * x).sin() * (two_pi * y).sin()
}

/// Constructs the control problem a config describes. The source term is
/// zero in every built-in example.
pub fn build_example(config: &RunConfig) -> Result<ControlProblem> {
    let c = config.normalized()?;
    let grid = Grid::new(c.n, QuadratureRule::Trapezoid)?;
    let params = PenaltyParams::new(
        c.p,
        c.gamma,
        c.alpha.expect("normalized fills alpha"),
        c.beta.expect("normalized fills beta"),
    )?;
    let y_d = match c.example {
        ExampleKind::Example1 | ExampleKind::Example2Comparison => {
            Field::from_fn(&grid, tracking_target_example1)
        }
        ExampleKind::Example3Box => Field::from_fn(&grid, tracking_target_example3),
        ExampleKind::Custom => Field::zeros(c.n),
    };
    let f = Field::zeros(c.n);
    let mut problem =
        ControlProblem::new(grid, EllipticOperatorSpec::laplacian(), y_d, f, params)?;
    // The primal-dual scheme is native to the gradient-energy control cost,
    // so selecting it switches the formulation accordingly.
    if c.example == ExampleKind::Example2Comparison || c.algorithm == Algorithm::Pd {
        problem = problem.with_control_penalty(ControlPenalty::GradSquared);
    }
    if let Some((lo, hi)) = c.box_bounds {
        problem = problem.with_box(BoxConstraints::new(lo, hi)?);
    }
    Ok(problem)
}

fn dca_options(c: &RunConfig) -> DcaOptions {
    DcaOptions {
        outer_tol: c.outer_tol,
        max_outer: c.max_outer,
        ..DcaOptions::default()
    }
}

/// Primal-dual knobs for a config: epsilon is chosen so that the
/// epsilon-regularization and the config's Huber regularization have the
/// same worst-case penalty error, making cost comparisons meaningful.
fn pd_params_for(c: &RunConfig) -> Result<PdParams> {
    if c.p <= 1.0 {
        return Err(SparseOcError::invalid(
            "the primal-dual baseline requires p > 1 (at p = 1 the matched regularization degenerates)",
        ));
    }
    let re = huber_sup_gap(c.p, c.gamma);
    Ok(PdParams {
        epsilon: epsilon_for_gap(c.p, re),
        row2_sign: Row2Sign::AdjointConsistent,
        max_outer: c.max_outer,
        ..PdParams::default()
    })
}

fn solve_one(
    problem: &ControlProblem,
    c: &RunConfig,
    algorithm: Algorithm,
) -> Result<SolveReport> {
    let u0 = Field::zeros(problem.grid().n());
    match algorithm {
        Algorithm::Dca => dca_solve(problem, &u0, &dca_options(c)),
        Algorithm::Pd => pd_solve(problem, &u0, &pd_params_for(c)?),
    }
}

/// Runs the configured experiment and writes all artifacts under
/// `output_dir`. On a mid-sweep failure the rows completed so far remain on
/// disk.
pub fn run(config: &RunConfig) -> Result<()> {
    let c = config.normalized()?;
    std::fs::create_dir_all(&c.output_dir)?;
    if let Some(sweep) = c.sweep.clone() {
        if c.example == ExampleKind::Example2Comparison {
            return Err(SparseOcError::invalid(
                "sweep and the comparison example are mutually exclusive; sweep a single-algorithm example instead",
            ));
        }
        run_sweep(&c, &sweep)
    } else if c.example == ExampleKind::Example2Comparison {
        run_comparison(&c)
    } else {
        let problem = build_example(&c)?;
        let report = solve_one(&problem, &c, c.algorithm)?;
        let echo = serde_json::to_value(&c)?;
        write_solve_outputs(
            &c.output_dir,
            &echo,
            problem.grid(),
            &report,
            NEAR_NULL_TOL,
        )
    }
}

fn run_sweep(c: &RunConfig, sweep: &SweepSpec) -> Result<()> {
    let sweep_path = c.output_dir.join("sweep.csv");
    let mut rows: Vec<SweepRow> = Vec::new();
    for (idx, &value) in sweep.values.iter().enumerate() {
        let mut entry = c.clone();
        entry.sweep = None;
        entry.output_dir = c.output_dir.join(format!("sweep_{idx:03}"));
        match sweep.param {
            SweepParam::Alpha => entry.alpha = Some(value),
            SweepParam::Beta => entry.beta = Some(value),
            SweepParam::Gamma => entry.gamma = value,
            SweepParam::P => entry.p = value,
        }
        let entry = entry.normalized()?;
        let problem = build_example(&entry)?;
        let report = solve_one(&problem, &entry, entry.algorithm)?;
        let echo = serde_json::to_value(&entry)?;
        write_solve_outputs(
            &entry.output_dir,
            &echo,
            problem.grid(),
            &report,
            NEAR_NULL_TOL,
        )?;
        rows.push(SweepRow {
            value,
            cost: report.cost_exact.total,
            null_entries: sparsity_count(&report.u, 0.0),
            iterations: report.iterations.len(),
        });
        // Rewritten after every entry so a later failure keeps earlier rows.
        write_sweep_csv(&sweep_path, &rows)?;
    }
    Ok(())
}

fn run_comparison(c: &RunConfig) -> Result<()> {
    let problem = build_example(c)?;
    let mut reports: Vec<(Algorithm, &str, SolveReport)> = Vec::new();
    for (algorithm, name) in [(Algorithm::Dca, "dca"), (Algorithm::Pd, "pd")] {
        let report = solve_one(&problem, c, algorithm)?;
        reports.push((algorithm, name, report));
    }
    for (algorithm, name, report) in &reports {
        let mut side = c.clone();
        side.algorithm = *algorithm;
        side.output_dir = c.output_dir.join(name);
        let echo = serde_json::to_value(&side)?;
        write_solve_outputs(
            &side.output_dir,
            &echo,
            problem.grid(),
            report,
            NEAR_NULL_TOL,
        )?;
    }
    write_comparison_csv(
        &c.output_dir.join("comparison.csv"),
        &reports[0].2.iterations,
        &reports[1].2.iterations,
    )
}
