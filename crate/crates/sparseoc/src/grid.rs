//! Uniform interior lattice on the unit square, node fields, and quadrature.
//!
//! The domain is (0,1)^2 with homogeneous Dirichlet data, so only interior
//! nodes carry unknowns: `n` nodes per axis at coordinates (i+1)h, (j+1)h
//! with h = 1/(n+1). Fields are stored row-major, x varying fastest.
//!
//! Integrals use the composite trapezoid rule over the hull of the interior
//! nodes, [h, 1-h]^2. Per-node weights are h^2 in the interior of the hull,
//! h^2/2 on its edges, h^2/4 at its corners; they sum to (n-1)^2 h^2, the
//! hull area. A plain h^2-per-node rule is available as a sensitivity switch.

use crate::error::SparseOcError;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    /// Composite trapezoid over the interior-node hull.
    Trapezoid,
    /// Uniform h^2 per node.
    PureH2,
}

#[derive(Debug, Clone)]
pub struct Grid {
    n: usize,
    h: f64,
    rule: QuadratureRule,
    weights: Vec<f64>,
}

impl Grid {
    /// Builds an n-by-n interior lattice. Fails for n = 0.
    pub fn new(n: usize, rule: QuadratureRule) -> Result<Grid> {
        if n == 0 {
            return Err(SparseOcError::invalid("grid size n must be positive"));
        }
        let h = 1.0 / (n as f64 + 1.0);
        let weights = match rule {
            QuadratureRule::PureH2 => vec![h * h; n * n],
            QuadratureRule::Trapezoid => {
                // Product of 1-D trapezoid weights h*{1/2, 1, ..., 1, 1/2}.
                // A single node has no hull to integrate over; it keeps the
                // uniform weight h^2 so that weights stay strictly positive.
                let w1: Vec<f64> = if n == 1 {
                    vec![h]
                } else {
                    (0..n)
                        .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
                        .collect()
                };
                let mut w = Vec::with_capacity(n * n);
                for j in 0..n {
                    for i in 0..n {
                        w.push(w1[i] * w1[j]);
                    }
                }
                w
            }
        };
        Ok(Grid {
            n,
            h,
            rule,
            weights,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn rule(&self) -> QuadratureRule {
        self.rule
    }

    pub fn num_nodes(&self) -> usize {
        self.n * self.n
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Flat index of node (i, j); i indexes x, j indexes y.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    /// Coordinates of the node with flat index k.
    #[inline]
    pub fn coord(&self, k: usize) -> (f64, f64) {
        let i = k % self.n;
        let j = k / self.n;
        ((i as f64 + 1.0) * self.h, (j as f64 + 1.0) * self.h)
    }

    /// Trapezoid integral of a node field.
    pub fn integrate(&self, f: &Field) -> f64 {
        debug_assert_eq!(f.n(), self.n);
        self.weights
            .iter()
            .zip(f.values())
            .map(|(w, v)| w * v)
            .sum()
    }

    /// Weighted L2 inner product <f, g> = sum_i w_i f_i g_i.
    pub fn dot(&self, f: &Field, g: &Field) -> f64 {
        debug_assert_eq!(f.n(), self.n);
        debug_assert_eq!(g.n(), self.n);
        self.weights
            .iter()
            .zip(f.values().iter().zip(g.values()))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    }

    /// Squared weighted L2 norm.
    pub fn norm_l2_sq(&self, f: &Field) -> f64 {
        self.dot(f, f)
    }

    pub fn norm_l2(&self, f: &Field) -> f64 {
        self.norm_l2_sq(f).max(0.0).sqrt()
    }

    /// Weighted L1 norm, sum_i w_i |f_i|.
    pub fn norm_l1(&self, f: &Field) -> f64 {
        self.weights
            .iter()
            .zip(f.values())
            .map(|(w, v)| w * v.abs())
            .sum()
    }

    /// Area covered by the quadrature rule (sum of weights).
    pub fn covered_area(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Scalar values on the grid nodes, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    n: usize,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(n: usize) -> Field {
        Field {
            n,
            values: vec![0.0; n * n],
        }
    }

    pub fn constant(n: usize, c: f64) -> Field {
        Field {
            n,
            values: vec![c; n * n],
        }
    }

    /// Evaluates `f(x, y)` at every node.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Field {
        let n = grid.n();
        let values = (0..n * n)
            .map(|k| {
                let (x, y) = grid.coord(k);
                f(x, y)
            })
            .collect();
        Field { n, values }
    }

    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Field> {
        if values.len() != n * n {
            return Err(SparseOcError::invalid(format!(
                "field length {} does not match grid with n = {}",
                values.len(),
                n
            )));
        }
        Ok(Field { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn linf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// self + s * other, elementwise.
    pub fn axpy(&self, s: f64, other: &Field) -> Field {
        debug_assert_eq!(self.n, other.n);
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + s * b)
            .collect();
        Field { n: self.n, values }
    }

    pub fn scale(&self, s: f64) -> Field {
        Field {
            n: self.n,
            values: self.values.iter().map(|v| s * v).collect(),
        }
    }

    pub fn sub(&self, other: &Field) -> Field {
        self.axpy(-1.0, other)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            n: self.n,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Sign convention used throughout: sign(0) = 0.
#[inline]
pub fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_grid() {
        assert!(Grid::new(0, QuadratureRule::Trapezoid).is_err());
    }

    #[test]
    fn n3_trapezoid_weights() {
        // h = 1/4: corners h^2/4, edges h^2/2, center h^2.
        let g = Grid::new(3, QuadratureRule::Trapezoid).unwrap();
        let h2 = 0.0625;
        let expect = [
            0.25 * h2,
            0.5 * h2,
            0.25 * h2,
            0.5 * h2,
            h2,
            0.5 * h2,
            0.25 * h2,
            0.5 * h2,
            0.25 * h2,
        ];
        for (w, e) in g.weights().iter().zip(expect) {
            assert!((w - e).abs() < 1e-15);
        }
        let sum: f64 = g.weights().iter().sum();
        assert!((sum - 0.25).abs() < 1e-15); // (n-1)^2 h^2 = 4 * 1/64
    }

    #[test]
    fn weights_positive_and_sum_to_hull_area() {
        for n in 2..24 {
            let g = Grid::new(n, QuadratureRule::Trapezoid).unwrap();
            assert!(g.weights().iter().all(|&w| w > 0.0));
            let hull = ((n - 1) as f64 * g.h()).powi(2);
            assert!(
                (g.covered_area() - hull).abs() < 1e-14,
                "n = {n}: {} vs {hull}",
                g.covered_area()
            );
        }
    }

    #[test]
    fn single_node_weight_is_h2() {
        let g = Grid::new(1, QuadratureRule::Trapezoid).unwrap();
        assert_eq!(g.weights().len(), 1);
        assert!((g.weights()[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn integrate_constant_covers_hull() {
        let g = Grid::new(9, QuadratureRule::Trapezoid).unwrap();
        let one = Field::constant(9, 1.0);
        assert!((g.integrate(&one) - g.covered_area()).abs() < 1e-14);
    }

    #[test]
    fn integrate_is_linear() {
        let g = Grid::new(5, QuadratureRule::Trapezoid).unwrap();
        let f = Field::from_fn(&g, |x, y| x * y + 0.3);
        let gfield = Field::from_fn(&g, |x, y| (x - y).sin());
        let lhs = g.integrate(&f.axpy(2.5, &gfield));
        let rhs = g.integrate(&f) + 2.5 * g.integrate(&gfield);
        assert!((lhs - rhs).abs() < 1e-14);
    }

    #[test]
    fn norm_l1_single_node() {
        let g = Grid::new(1, QuadratureRule::Trapezoid).unwrap();
        let u = Field::constant(1, 2.0);
        assert!((g.norm_l1(&u) - 2.0 * g.weights()[0]).abs() < 1e-15);
    }

    #[test]
    fn norm_l1_is_even() {
        let g = Grid::new(6, QuadratureRule::Trapezoid).unwrap();
        let u = Field::from_fn(&g, |x, y| (13.0 * x).sin() - y);
        assert!((g.norm_l1(&u) - g.norm_l1(&u.scale(-1.0))).abs() < 1e-15);
    }

    #[test]
    fn coord_roundtrip() {
        let g = Grid::new(4, QuadratureRule::Trapezoid).unwrap();
        let k = g.index(2, 3);
        let (x, y) = g.coord(k);
        assert!((x - 3.0 * g.h()).abs() < 1e-15);
        assert!((y - 4.0 * g.h()).abs() < 1e-15);
    }

    #[test]
    fn sign_of_zero_is_zero() {
        assert_eq!(sign(0.0), 0.0);
        assert_eq!(sign(-0.0), 0.0);
        assert_eq!(sign(3.0), 1.0);
        assert_eq!(sign(-0.2), -1.0);
    }

    #[test]
    fn pure_h2_rule_is_uniform() {
        let g = Grid::new(3, QuadratureRule::PureH2).unwrap();
        assert!(g.weights().iter().all(|&w| (w - 0.0625).abs() < 1e-15));
    }
}
