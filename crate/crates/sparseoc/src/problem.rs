//! The reduced optimal control problem: data, operator, and the smooth part
//! of the objective.

use crate::error::SparseOcError;
use crate::grid::{Field, Grid};
use crate::pde::{
    assemble_operator, solve_adjoint, AssembledOperator, EllipticOperatorSpec,
};
use crate::penalty::PenaltyParams;
use crate::subproblem::BoxConstraints;
use crate::Result;

/// Quadratic control term of the smooth cost.
///
/// `Tikhonov` is the plain alpha/2 * ||u||^2 term (alpha may be zero).
/// `GradSquared` additionally charges 1/2 * int |grad u|^2, which keeps the
/// smooth part strongly convex even with alpha = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlPenalty {
    Tikhonov,
    GradSquared,
}

/// Reduced problem min_u F(u) + beta * penalty(u) with
/// F(u) = 1/2 ||S(u + f) - y_d||^2 + quadratic control terms.
#[derive(Debug, Clone)]
pub struct ControlProblem {
    grid: Grid,
    operator: AssembledOperator,
    y_d: Field,
    f: Field,
    params: PenaltyParams,
    control_penalty: ControlPenalty,
    box_constraints: Option<BoxConstraints>,
}

impl ControlProblem {
    pub fn new(
        grid: Grid,
        spec: EllipticOperatorSpec,
        y_d: Field,
        f: Field,
        params: PenaltyParams,
    ) -> Result<Self> {
        if y_d.n() != grid.n() || f.n() != grid.n() {
            return Err(SparseOcError::invalid(format!(
                "data fields must live on the {0}x{0} grid",
                grid.n()
            )));
        }
        let operator = assemble_operator(&grid, &spec)?;
        Ok(ControlProblem {
            grid,
            operator,
            y_d,
            f,
            params,
            control_penalty: ControlPenalty::Tikhonov,
            box_constraints: None,
        })
    }

    pub fn with_control_penalty(mut self, penalty: ControlPenalty) -> Self {
        self.control_penalty = penalty;
        self
    }

    pub fn with_box(mut self, bounds: BoxConstraints) -> Self {
        self.box_constraints = Some(bounds);
        self
    }

    pub fn box_constraints(&self) -> Option<&BoxConstraints> {
        self.box_constraints.as_ref()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn operator(&self) -> &AssembledOperator {
        &self.operator
    }

    pub fn y_d(&self) -> &Field {
        &self.y_d
    }

    pub fn f(&self) -> &Field {
        &self.f
    }

    pub fn params(&self) -> &PenaltyParams {
        &self.params
    }

    pub fn set_params(&mut self, params: PenaltyParams) {
        self.params = params;
    }

    pub fn set_y_d(&mut self, y_d: Field) -> Result<()> {
        if y_d.n() != self.grid.n() {
            return Err(SparseOcError::invalid(
                "y_d does not match the problem grid".to_string(),
            ));
        }
        self.y_d = y_d;
        Ok(())
    }

    pub fn control_penalty(&self) -> ControlPenalty {
        self.control_penalty
    }

    /// Discrete Dirichlet energy 1/2 * int |grad u|^2, via summation by
    /// parts: 1/2 h^2 u^T (-Laplacian_h) u with Dirichlet zeros off-lattice.
    pub fn dirichlet_energy(&self, u: &Field) -> f64 {
        let lap = self.laplacian0().apply(u);
        let h2 = self.grid.h() * self.grid.h();
        0.5 * h2
            * u.values()
                .iter()
                .zip(lap.values())
                .map(|(a, b)| a * b)
                .sum::<f64>()
    }

    /// Pure -Laplacian stencil regardless of the problem operator's c0; used
    /// only for the gradient control penalty.
    pub(crate) fn laplacian0(&self) -> AssembledOperator {
        assemble_operator(&self.grid, &EllipticOperatorSpec::laplacian())
            .expect("c0 = 0 is always valid")
    }

    /// Gradient of the smooth cost in the weighted inner product:
    /// S*(y - y_d) + alpha*u, plus the gradient-penalty term when enabled.
    pub fn smooth_gradient(&self, u: &Field, y: &Field) -> Result<Field> {
        let phi = solve_adjoint(self, y)?;
        self.gradient_from_adjoint(u, &phi)
    }

    /// Same gradient assembled from an already-computed adjoint state.
    pub fn gradient_from_adjoint(&self, u: &Field, phi: &Field) -> Result<Field> {
        let mut g = phi.axpy(self.params.alpha, u);
        if self.control_penalty == ControlPenalty::GradSquared {
            let lap = self.laplacian0().apply(u);
            let h2 = self.grid.h() * self.grid.h();
            let w = self.grid.weights();
            let extra = Field::from_values(
                self.grid.n(),
                lap.values()
                    .iter()
                    .zip(w)
                    .map(|(v, wi)| h2 * v / wi)
                    .collect(),
            )?;
            g = g.axpy(1.0, &extra);
        }
        Ok(g)
    }

    /// Smooth cost and its gradient in one call; y must be the state of u.
    pub fn cost_smooth(&self, u: &Field, y: &Field) -> Result<(f64, Field)> {
        Ok((self.smooth_cost(u, y), self.smooth_gradient(u, y)?))
    }

    /// Smooth cost F(u) at a known state y.
    pub fn smooth_cost(&self, u: &Field, y: &Field) -> f64 {
        let tracking = 0.5 * self.grid.norm_l2_sq(&y.sub(&self.y_d));
        let tikhonov = 0.5 * self.params.alpha * self.grid.norm_l2_sq(u);
        let energy = match self.control_penalty {
            ControlPenalty::Tikhonov => 0.0,
            ControlPenalty::GradSquared => self.dirichlet_energy(u),
        };
        tracking + tikhonov + energy
    }
}
