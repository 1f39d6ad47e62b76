//! Elliptic operator on the interior lattice and the linear solves built on it.
//!
//! The operator is A = -Laplacian + c0*I discretized with the standard
//! 5-point stencil and homogeneous Dirichlet boundary values; it is symmetric
//! positive definite for c0 >= 0. Systems are solved by conjugate gradients
//! with Jacobi preconditioning to a relative residual of 1e-10.

use crate::error::SparseOcError;
use crate::grid::{Field, Grid};
use crate::problem::ControlProblem;
use crate::Result;

/// Relative residual tolerance for all CG solves.
pub const CG_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    NegativeLaplacian,
}

/// Specification of the elliptic operator A = -Laplacian + c0*I.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct EllipticOperatorSpec {
    pub kind: OperatorKind,
    /// Zeroth-order coefficient, must be >= 0.
    pub c0: f64,
}

impl EllipticOperatorSpec {
    pub fn laplacian() -> Self {
        EllipticOperatorSpec {
            kind: OperatorKind::NegativeLaplacian,
            c0: 0.0,
        }
    }

    pub fn with_c0(c0: f64) -> Self {
        EllipticOperatorSpec {
            kind: OperatorKind::NegativeLaplacian,
            c0,
        }
    }
}

/// Matrix-free 5-point stencil bound to a grid size.
#[derive(Debug, Clone)]
pub struct AssembledOperator {
    n: usize,
    h: f64,
    c0: f64,
}

pub fn assemble_operator(grid: &Grid, spec: &EllipticOperatorSpec) -> Result<AssembledOperator> {
    if !(spec.c0 >= 0.0) {
        return Err(SparseOcError::invalid(format!(
            "operator coefficient c0 must be >= 0, got {}",
            spec.c0
        )));
    }
    Ok(AssembledOperator {
        n: grid.n(),
        h: grid.h(),
        c0: spec.c0,
    })
}

impl AssembledOperator {
    pub fn n(&self) -> usize {
        self.n
    }

    /// A u: 5-point stencil with Dirichlet zeros outside the lattice.
    pub fn apply(&self, u: &Field) -> Field {
        debug_assert_eq!(u.n(), self.n);
        let n = self.n;
        let inv_h2 = 1.0 / (self.h * self.h);
        let v = u.values();
        let mut out = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                let k = j * n + i;
                let mut acc = 4.0 * v[k];
                if i > 0 {
                    acc -= v[k - 1];
                }
                if i + 1 < n {
                    acc -= v[k + 1];
                }
                if j > 0 {
                    acc -= v[k - n];
                }
                if j + 1 < n {
                    acc -= v[k + n];
                }
                out[k] = acc * inv_h2 + self.c0 * v[k];
            }
        }
        Field::from_values(n, out).expect("length preserved")
    }

    /// Smallest eigenvalue of the stencil (closed form for the 5-point
    /// Laplacian on a uniform lattice).
    pub fn lambda_min(&self) -> f64 {
        let s = (std::f64::consts::PI * self.h / 2.0).sin();
        8.0 / (self.h * self.h) * s * s + self.c0
    }

    /// Largest eigenvalue of the stencil.
    pub fn lambda_max(&self) -> f64 {
        let c = (std::f64::consts::PI * self.h / 2.0).cos();
        8.0 / (self.h * self.h) * c * c + self.c0
    }

    /// Solves A x = b by Jacobi-preconditioned CG. Returns the solution and
    /// the iteration count.
    pub fn solve(&self, b: &Field, rel_tol: f64) -> Result<(Field, usize)> {
        debug_assert_eq!(b.n(), self.n);
        let diag = 4.0 / (self.h * self.h) + self.c0;
        let max_iter = 60 * (self.n + 2);
        pcg(
            |v| self.apply(v),
            |_| 1.0 / diag,
            b,
            rel_tol,
            max_iter,
            "cg",
        )
    }
}

/// Jacobi-preconditioned conjugate gradients for a symmetric positive
/// definite `apply`. `inv_diag` maps a node index to the inverse of the
/// operator diagonal there.
pub(crate) fn pcg(
    apply: impl Fn(&Field) -> Field,
    inv_diag: impl Fn(usize) -> f64,
    b: &Field,
    rel_tol: f64,
    max_iter: usize,
    solver: &'static str,
) -> Result<(Field, usize)> {
    let n = b.n();
    let bnorm = b.values().iter().map(|v| v * v).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        return Ok((Field::zeros(n), 0));
    }
    let precondition = |r: &Field| -> Field {
        Field::from_values(
            n,
            r.values()
                .iter()
                .enumerate()
                .map(|(k, v)| v * inv_diag(k))
                .collect(),
        )
        .expect("length preserved")
    };
    let tol = rel_tol * bnorm;

    let mut x = Field::zeros(n);
    let mut r = b.clone();
    let mut z = precondition(&r);
    let mut p = z.clone();
    let mut rz = dot_euclid(&r, &z);
    let mut rnorm = bnorm;

    for iter in 1..=max_iter {
        let ap = apply(&p);
        let pap = dot_euclid(&p, &ap);
        if pap <= 0.0 {
            return Err(SparseOcError::SolverFailure {
                solver,
                residual: rnorm / bnorm,
                iterations: iter,
            });
        }
        let alpha = rz / pap;
        x = x.axpy(alpha, &p);
        r = r.axpy(-alpha, &ap);
        rnorm = r.values().iter().map(|v| v * v).sum::<f64>().sqrt();
        if rnorm <= tol {
            return Ok((x, iter));
        }
        z = precondition(&r);
        let rz_new = dot_euclid(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p = z.axpy(beta, &p);
    }
    Err(SparseOcError::SolverFailure {
        solver,
        residual: rnorm / bnorm,
        iterations: max_iter,
    })
}

#[inline]
fn dot_euclid(a: &Field, b: &Field) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| x * y)
        .sum()
}

/// Solves the state equation A y = u + f.
pub fn solve_state(problem: &ControlProblem, u: &Field) -> Result<Field> {
    let rhs = u.axpy(1.0, problem.f());
    let (y, _) = problem.operator().solve(&rhs, CG_REL_TOL)?;
    Ok(y)
}

/// Solves the adjoint equation for the residual y - y_d.
///
/// The adjoint is taken with respect to the weighted (quadrature) inner
/// product: S* = W^{-1} S W with W = diag(weights). With uniform weights the
/// scaling is the identity; with trapezoid weights it perturbs only the ring
/// of hull-boundary nodes and keeps <S u, v> = <u, S* v> exact, which in turn
/// makes the discrete cost gradients exact (finite-difference consistent).
pub fn solve_adjoint(problem: &ControlProblem, y: &Field) -> Result<Field> {
    let grid = problem.grid();
    let residual = y.sub(problem.y_d());
    weighted_adjoint_apply_inv(problem, &residual).map_err(|e| match e {
        SparseOcError::SolverFailure {
            residual,
            iterations,
            ..
        } => SparseOcError::SolverFailure {
            solver: "cg(adjoint)",
            residual,
            iterations,
        },
        other => other,
    })
    .map(|phi| {
        debug_assert_eq!(phi.n(), grid.n());
        phi
    })
}

/// S* r = W^{-1} A^{-1} (W r).
pub(crate) fn weighted_adjoint_apply_inv(problem: &ControlProblem, r: &Field) -> Result<Field> {
    let grid = problem.grid();
    let w = grid.weights();
    let scaled = Field::from_values(
        grid.n(),
        r.values().iter().zip(w).map(|(v, wi)| v * wi).collect(),
    )?;
    let (sol, _) = problem.operator().solve(&scaled, CG_REL_TOL)?;
    Field::from_values(
        grid.n(),
        sol.values()
            .iter()
            .zip(w)
            .map(|(v, wi)| v / wi)
            .collect(),
    )
}

/// Dense LU solve with partial pivoting. Test oracle for small grids; not
/// used by the solver path.
#[doc(hidden)]
pub fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().map(|row| row.clone()).collect();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&r1, &r2| m[r1][col].abs().total_cmp(&m[r2][col].abs()))
            .unwrap();
        m.swap(col, piv);
        rhs.swap(col, piv);
        let d = m[col][col];
        assert!(d.abs() > 0.0, "singular dense system");
        for row in col + 1..n {
            let factor = m[row][col] / d;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                m[row][k] -= factor * m[col][k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in row + 1..n {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    x
}

/// Dense matrix of the assembled operator, built column by column.
#[doc(hidden)]
pub fn dense_matrix(op: &AssembledOperator) -> Vec<Vec<f64>> {
    let n2 = op.n() * op.n();
    let mut cols = Vec::with_capacity(n2);
    for k in 0..n2 {
        let mut e = Field::zeros(op.n());
        e.values_mut()[k] = 1.0;
        cols.push(op.apply(&e));
    }
    (0..n2)
        .map(|row| (0..n2).map(|col| cols[col].values()[row]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::QuadratureRule;
    use crate::penalty::PenaltyParams;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_field(n: usize, rng: &mut ChaCha8Rng) -> Field {
        let vals = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        Field::from_values(n, vals).unwrap()
    }

    fn toy_problem(n: usize, c0: f64) -> ControlProblem {
        let grid = Grid::new(n, QuadratureRule::Trapezoid).unwrap();
        let params = PenaltyParams::new(2.0, 10.0, 0.5, 0.01).unwrap();
        ControlProblem::new(
            grid,
            EllipticOperatorSpec::with_c0(c0),
            Field::zeros(n),
            Field::zeros(n),
            params,
        )
        .unwrap()
    }

    #[test]
    fn single_node_stencil_is_16() {
        // h = 1/2, so 4/h^2 = 16 for the lone interior node.
        let grid = Grid::new(1, QuadratureRule::Trapezoid).unwrap();
        let op = assemble_operator(&grid, &EllipticOperatorSpec::laplacian()).unwrap();
        let u = Field::constant(1, 1.0);
        assert!((op.apply(&u).values()[0] - 16.0).abs() < 1e-12);
        assert!((op.lambda_min() - 16.0).abs() < 1e-9);
        assert!((op.lambda_max() - 16.0).abs() < 1e-9);
    }

    #[test]
    fn c0_adds_identity() {
        let grid = Grid::new(5, QuadratureRule::Trapezoid).unwrap();
        let op0 = assemble_operator(&grid, &EllipticOperatorSpec::laplacian()).unwrap();
        let op1 = assemble_operator(&grid, &EllipticOperatorSpec::with_c0(1.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = random_field(5, &mut rng);
        let diff = op1.apply(&u).sub(&op0.apply(&u)).sub(&u);
        assert!(diff.linf() < 1e-12);
    }

    #[test]
    fn negative_c0_rejected() {
        let grid = Grid::new(3, QuadratureRule::Trapezoid).unwrap();
        assert!(assemble_operator(&grid, &EllipticOperatorSpec::with_c0(-0.1)).is_err());
    }

    #[test]
    fn stencil_is_symmetric_and_positive() {
        let grid = Grid::new(7, QuadratureRule::Trapezoid).unwrap();
        let op = assemble_operator(&grid, &EllipticOperatorSpec::with_c0(0.3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let u = random_field(7, &mut rng);
            let v = random_field(7, &mut rng);
            let uv = dot_euclid(&op.apply(&u), &v);
            let vu = dot_euclid(&u, &op.apply(&v));
            let nu = dot_euclid(&u, &u).sqrt();
            let nv = dot_euclid(&v, &v).sqrt();
            assert!((uv - vu).abs() <= 1e-12 * nu * nv);
            assert!(dot_euclid(&op.apply(&u), &u) > 0.0);
        }
    }

    #[test]
    fn cg_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for n in [4usize, 8] {
            let grid = Grid::new(n, QuadratureRule::Trapezoid).unwrap();
            let op = assemble_operator(&grid, &EllipticOperatorSpec::with_c0(0.7)).unwrap();
            let a = dense_matrix(&op);
            for _ in 0..5 {
                let b = random_field(n, &mut rng);
                let (x_cg, _) = op.solve(&b, CG_REL_TOL).unwrap();
                let x_dense = dense_solve(&a, b.values());
                let scale = x_dense.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let err = x_cg
                    .values()
                    .iter()
                    .zip(&x_dense)
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                assert!(err <= 1e-8 * scale.max(1.0), "n = {n}: err {err}");
            }
        }
    }

    #[test]
    fn zero_rhs_short_circuits() {
        let grid = Grid::new(6, QuadratureRule::Trapezoid).unwrap();
        let op = assemble_operator(&grid, &EllipticOperatorSpec::laplacian()).unwrap();
        let (x, iters) = op.solve(&Field::zeros(6), CG_REL_TOL).unwrap();
        assert_eq!(iters, 0);
        assert_eq!(x.linf(), 0.0);
    }

    #[test]
    fn single_node_state_and_adjoint() {
        let mut p = toy_problem(1, 0.0);
        // u = 1, f = 0: y = 1/16.
        let y = solve_state(&p, &Field::constant(1, 1.0)).unwrap();
        assert!((y.values()[0] - 1.0 / 16.0).abs() < 1e-12);
        // y - y_d = 16: phi = 1 (the weight cancels on a single node).
        p.set_y_d(Field::zeros(1)).unwrap();
        let phi = solve_adjoint(&p, &Field::constant(1, 16.0)).unwrap();
        assert!((phi.values()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn state_with_u_equals_minus_f_is_zero() {
        let grid = Grid::new(5, QuadratureRule::Trapezoid).unwrap();
        let params = PenaltyParams::new(2.0, 10.0, 0.5, 0.01).unwrap();
        let f = Field::from_fn(&grid, |x, y| x + 2.0 * y);
        let problem = ControlProblem::new(
            grid,
            EllipticOperatorSpec::laplacian(),
            Field::zeros(5),
            f.clone(),
            params,
        )
        .unwrap();
        let y = solve_state(&problem, &f.scale(-1.0)).unwrap();
        assert!(y.linf() < 1e-12);
    }

    #[test]
    fn adjoint_of_matching_state_is_zero() {
        let grid = Grid::new(5, QuadratureRule::Trapezoid).unwrap();
        let params = PenaltyParams::new(2.0, 10.0, 0.5, 0.01).unwrap();
        let y_d = Field::from_fn(&grid, |x, y| (x * y).cos());
        let problem = ControlProblem::new(
            grid,
            EllipticOperatorSpec::laplacian(),
            y_d.clone(),
            Field::zeros(5),
            params,
        )
        .unwrap();
        let phi = solve_adjoint(&problem, &y_d).unwrap();
        assert!(phi.linf() < 1e-12);
    }

    #[test]
    fn weighted_adjoint_identity() {
        // <S u, v>_w == <u, S* v>_w up to solver tolerance.
        let problem = toy_problem(6, 0.0);
        let grid = problem.grid();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..10 {
            let u = random_field(6, &mut rng);
            let v = random_field(6, &mut rng);
            let (su, _) = problem.operator().solve(&u, CG_REL_TOL).unwrap();
            let sv = weighted_adjoint_apply_inv(&problem, &v).unwrap();
            let lhs = grid.dot(&su, &v);
            let rhs = grid.dot(&u, &sv);
            assert!(
                (lhs - rhs).abs() <= 1e-9 * (lhs.abs() + rhs.abs() + 1.0),
                "{lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn laplace_error_shrinks_with_refinement() {
        // Manufactured solution sin(pi x) sin(pi y); the full order-of-
        // convergence check lives in the acceptance suite.
        let mut errs = Vec::new();
        for n in [7usize, 15] {
            let grid = Grid::new(n, QuadratureRule::Trapezoid).unwrap();
            let op = assemble_operator(&grid, &EllipticOperatorSpec::laplacian()).unwrap();
            let pi = std::f64::consts::PI;
            let rhs = Field::from_fn(&grid, |x, y| {
                2.0 * pi * pi * (pi * x).sin() * (pi * y).sin()
            });
            let exact = Field::from_fn(&grid, |x, y| (pi * x).sin() * (pi * y).sin());
            let (y, _) = op.solve(&rhs, CG_REL_TOL).unwrap();
            errs.push(y.sub(&exact).linf());
        }
        assert!(errs[1] < 0.5 * errs[0], "errors {errs:?}");
    }
}
