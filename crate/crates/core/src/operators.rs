//! Fixed-point operators built from closed-form metric projections.
//!
//! Every single projection is firmly nonexpansive, hence a cutter and
//! 1-strongly quasi-nonexpansive. Compositions and convex combinations carry
//! a conservative modulus derived from their parts:
//! `ρ = (Σ 1/ρᵢ)⁻¹` for compositions and `ρ = min ρᵢ` for averages. Only the
//! single-projection moduli are exact.

use nalgebra::{Cholesky, Dyn};

use crate::{Error, Matrix, Result, Vector};

/// Relative pivot threshold below which `AAᵀ` is treated as singular.
pub const PIVOT_RELATIVE_THRESHOLD: f64 = 1e-12;

/// Tolerance on the weight sum of a convex combination.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub enum OperatorKind {
    /// Projection onto `{x : ⟨a,x⟩ ≤ b}`.
    HalfspaceProjection {
        normal: Vector,
        offset: f64,
        normal_sq: f64,
    },
    /// Projection onto `{x : ⟨a,x⟩ = b}`.
    HyperplaneProjection {
        normal: Vector,
        offset: f64,
        normal_sq: f64,
    },
    /// Projection onto `{x : Ax = b}` for full-row-rank `A`.
    AffineProjection(AffineSet),
    /// Componentwise clamp onto `[lo, hi]`.
    BoxProjection {
        lo: Vector,
        hi: Vector,
    },
    /// Projection onto the closed ball `B(center, radius)`.
    BallProjection {
        center: Vector,
        radius: f64,
    },
    Identity,
    /// Applied first to last.
    Composition(Vec<FixedPointOperator>),
    ConvexCombination {
        ops: Vec<FixedPointOperator>,
        weights: Vec<f64>,
    },
}

/// An affine set `{x : Ax = b}` with `AAᵀ` factorized once.
#[derive(Debug, Clone)]
pub struct AffineSet {
    matrix: Matrix,
    rhs: Vector,
    gram: Cholesky<f64, Dyn>,
}

impl AffineSet {
    pub fn new(matrix: Matrix, rhs: Vector) -> Result<Self> {
        let (m, k) = matrix.shape();
        if m == 0 || k == 0 {
            return Err(Error::InvalidOperator("empty constraint matrix".into()));
        }
        if m > k {
            return Err(Error::InvalidOperator(format!(
                "affine set needs m <= k, got {m}x{k}"
            )));
        }
        if rhs.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: rhs.len(),
            });
        }
        let gram = &matrix * matrix.transpose();
        let chol = Cholesky::new(gram).ok_or(Error::RankDeficient {
            pivot: 0.0,
            threshold: 0.0,
        })?;
        let pivots: Vec<f64> = chol.l_dirty().diagonal().iter().map(|l| l * l).collect();
        let max_pivot = pivots.iter().cloned().fold(0.0, f64::max);
        let threshold = PIVOT_RELATIVE_THRESHOLD * max_pivot;
        if let Some(&pivot) = pivots.iter().find(|&&p| p < threshold) {
            return Err(Error::RankDeficient { pivot, threshold });
        }
        Ok(Self {
            matrix,
            rhs,
            gram: chol,
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &Vector {
        &self.rhs
    }

    /// `‖Ax − b‖`.
    pub fn violation(&self, x: &Vector) -> f64 {
        (&self.matrix * x - &self.rhs).norm()
    }

    fn project(&self, x: &Vector) -> Vector {
        let r = &self.matrix * x - &self.rhs;
        let lambda = self.gram.solve(&r);
        x - self.matrix.tr_mul(&lambda)
    }
}

/// An evaluable map `T: Rᵏ → Rᵏ` with a strong quasi-nonexpansiveness modulus.
///
/// Operators are immutable once built and can be shared between threads.
#[derive(Debug, Clone)]
pub struct FixedPointOperator {
    kind: OperatorKind,
    dim: usize,
    sqne_modulus: f64,
}

fn check_normal(a: &Vector) -> Result<f64> {
    let normal_sq = a.norm_squared();
    if !(normal_sq > 0.0) || !normal_sq.is_finite() {
        return Err(Error::InvalidOperator(
            "zero or non-finite normal vector".into(),
        ));
    }
    Ok(normal_sq)
}

impl FixedPointOperator {
    pub fn halfspace(normal: Vector, offset: f64) -> Result<Self> {
        let normal_sq = check_normal(&normal)?;
        Ok(Self {
            dim: normal.len(),
            kind: OperatorKind::HalfspaceProjection {
                normal,
                offset,
                normal_sq,
            },
            sqne_modulus: 1.0,
        })
    }

    pub fn hyperplane(normal: Vector, offset: f64) -> Result<Self> {
        let normal_sq = check_normal(&normal)?;
        Ok(Self {
            dim: normal.len(),
            kind: OperatorKind::HyperplaneProjection {
                normal,
                offset,
                normal_sq,
            },
            sqne_modulus: 1.0,
        })
    }

    pub fn affine(matrix: Matrix, rhs: Vector) -> Result<Self> {
        let set = AffineSet::new(matrix, rhs)?;
        Ok(Self {
            dim: set.matrix.ncols(),
            kind: OperatorKind::AffineProjection(set),
            sqne_modulus: 1.0,
        })
    }

    pub fn box_projection(lo: Vector, hi: Vector) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if let Some(j) = (0..lo.len()).find(|&j| !(lo[j] <= hi[j])) {
            return Err(Error::InvalidOperator(format!(
                "box bound lo[{j}] = {} exceeds hi[{j}] = {}",
                lo[j], hi[j]
            )));
        }
        Ok(Self {
            dim: lo.len(),
            kind: OperatorKind::BoxProjection { lo, hi },
            sqne_modulus: 1.0,
        })
    }

    /// Box with the same bounds on every coordinate.
    pub fn uniform_box(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::box_projection(Vector::from_element(dim, lo), Vector::from_element(dim, hi))
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidOperator(format!("ball radius {radius}")));
        }
        Ok(Self {
            dim: center.len(),
            kind: OperatorKind::BallProjection { center, radius },
            sqne_modulus: 1.0,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            kind: OperatorKind::Identity,
            sqne_modulus: 1.0,
        }
    }

    /// `ops` applied in order: the result maps `x` to `ops[last](…ops[0](x))`.
    pub fn compose(ops: Vec<FixedPointOperator>) -> Result<Self> {
        let dim = common_dim(&ops)?;
        let sqne_modulus = 1.0 / ops.iter().map(|op| 1.0 / op.sqne_modulus).sum::<f64>();
        Ok(Self {
            dim,
            kind: OperatorKind::Composition(ops),
            sqne_modulus,
        })
    }

    /// Weighted sum `Σ wᵢ Tᵢ(x)` with positive weights summing to one.
    pub fn average(ops: Vec<FixedPointOperator>, weights: Vec<f64>) -> Result<Self> {
        let dim = common_dim(&ops)?;
        if weights.len() != ops.len() {
            return Err(Error::DimensionMismatch {
                expected: ops.len(),
                got: weights.len(),
            });
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidOperator("weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidOperator(format!(
                "weights sum to {total}, not 1"
            )));
        }
        let sqne_modulus = ops
            .iter()
            .map(|op| op.sqne_modulus)
            .fold(f64::INFINITY, f64::min);
        Ok(Self {
            dim,
            kind: OperatorKind::ConvexCombination { ops, weights },
            sqne_modulus,
        })
    }

    /// Equal-weight average.
    pub fn uniform_average(ops: Vec<FixedPointOperator>) -> Result<Self> {
        let w = 1.0 / ops.len().max(1) as f64;
        let weights = vec![w; ops.len()];
        Self::average(ops, weights)
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Modulus `ρ` in `‖Tx − z‖² ≤ ‖x − z‖² − ρ‖Tx − x‖²`. Exact for single
    /// projections, a conservative estimate for composites.
    pub fn sqne_modulus(&self) -> f64 {
        self.sqne_modulus
    }

    /// True for a single metric projection (firmly nonexpansive, exact ρ = 1).
    pub fn is_single_projection(&self) -> bool {
        !matches!(
            self.kind,
            OperatorKind::Composition(_) | OperatorKind::ConvexCombination { .. }
        )
    }

    /// Evaluates `T(x)`.
    ///
    /// Panics if `x` does not have the operator's dimension.
    pub fn apply(&self, x: &Vector) -> Vector {
        assert_eq!(x.len(), self.dim, "operator dimension mismatch");
        match &self.kind {
            OperatorKind::HalfspaceProjection {
                normal,
                offset,
                normal_sq,
            } => {
                let excess = normal.dot(x) - offset;
                if excess <= 0.0 {
                    x.clone()
                } else {
                    x - normal * (excess / normal_sq)
                }
            }
            OperatorKind::HyperplaneProjection {
                normal,
                offset,
                normal_sq,
            } => {
                let excess = normal.dot(x) - offset;
                x - normal * (excess / normal_sq)
            }
            OperatorKind::AffineProjection(set) => set.project(x),
            OperatorKind::BoxProjection { lo, hi } => {
                Vector::from_fn(x.len(), |j, _| x[j].clamp(lo[j], hi[j]))
            }
            OperatorKind::BallProjection { center, radius } => {
                let offset = x - center;
                let dist = offset.norm();
                if dist <= *radius {
                    x.clone()
                } else {
                    center + offset * (radius / dist)
                }
            }
            OperatorKind::Identity => x.clone(),
            OperatorKind::Composition(ops) => {
                let mut y = x.clone();
                for op in ops {
                    y = op.apply(&y);
                }
                y
            }
            OperatorKind::ConvexCombination { ops, weights } => {
                let mut acc = Vector::zeros(self.dim);
                for (op, w) in ops.iter().zip(weights) {
                    acc.axpy(*w, &op.apply(x), 1.0);
                }
                acc
            }
        }
    }

    /// `T(x)` with a dimension check instead of a panic.
    pub fn try_apply(&self, x: &Vector) -> Result<Vector> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.apply(x))
    }

    /// `‖T(x) − x‖`.
    pub fn residual(&self, x: &Vector) -> f64 {
        (self.apply(x) - x).norm()
    }

    /// Wraps `self` with a final projection onto a ball, which keeps iterates
    /// bounded without changing `Fix T` when the ball contains it.
    pub fn with_enclosing_ball(self, center: Vector, radius: f64) -> Result<Self> {
        let ball = Self::ball(center, radius)?;
        Self::compose(vec![self, ball])
    }
}

fn common_dim(ops: &[FixedPointOperator]) -> Result<usize> {
    let first = ops
        .first()
        .ok_or_else(|| Error::InvalidOperator("empty operator list".into()))?;
    for op in ops {
        if op.dim != first.dim {
            return Err(Error::DimensionMismatch {
                expected: first.dim,
                got: op.dim,
            });
        }
    }
    Ok(first.dim)
}

/// Projection onto `{x : ⟨a,x⟩ ≤ b}`.
pub fn project_halfspace(a: &Vector, b: f64, x: &Vector) -> Result<Vector> {
    FixedPointOperator::halfspace(a.clone(), b)?.try_apply(x)
}

/// Componentwise clamp onto `[lo, hi]`.
pub fn project_box(lo: &Vector, hi: &Vector, x: &Vector) -> Result<Vector> {
    FixedPointOperator::box_projection(lo.clone(), hi.clone())?.try_apply(x)
}

/// Projection onto `{x : Ax = b}`, i.e. `x − Aᵀ(AAᵀ)⁻¹(Ax − b)`.
pub fn project_affine(a: &Matrix, b: &Vector, x: &Vector) -> Result<Vector> {
    FixedPointOperator::affine(a.clone(), b.clone())?.try_apply(x)
}

/// `‖T(x) − x‖`.
pub fn residual(op: &FixedPointOperator, x: &Vector) -> f64 {
    op.residual(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    #[test]
    fn halfspace_examples() {
        let a = v(&[1.0, 0.0]);
        assert_eq!(
            project_halfspace(&a, 0.0, &v(&[-1.0, 1.0])).unwrap(),
            v(&[-1.0, 1.0])
        );
        assert_eq!(
            project_halfspace(&a, 0.0, &v(&[2.0, 3.0])).unwrap(),
            v(&[0.0, 3.0])
        );
        let p = project_halfspace(&v(&[3.0, 4.0]), 5.0, &v(&[3.0, 4.0])).unwrap();
        assert_abs_diff_eq!(p, v(&[0.6, 0.8]), epsilon = 1e-15);
    }

    #[test]
    fn zero_normal_rejected() {
        let err = project_halfspace(&v(&[0.0, 0.0]), 1.0, &v(&[1.0, 1.0])).unwrap_err();
        assert!(matches!(err, Error::InvalidOperator(_)));
        assert!(FixedPointOperator::hyperplane(v(&[0.0]), 0.0).is_err());
    }

    #[test]
    fn box_examples() {
        let (lo, hi) = (v(&[0.0, 0.0]), v(&[1.0, 1.0]));
        assert_eq!(
            project_box(&lo, &hi, &v(&[0.5, 0.5])).unwrap(),
            v(&[0.5, 0.5])
        );
        assert_eq!(
            project_box(&lo, &hi, &v(&[-2.0, 3.0])).unwrap(),
            v(&[0.0, 1.0])
        );
        let p = project_box(&v(&[1.0, 1.0]), &v(&[2.0, 2.0]), &v(&[3.0, 0.5])).unwrap();
        assert_eq!(p, v(&[2.0, 1.0]));
    }

    #[test]
    fn inverted_box_rejected() {
        let err = project_box(&v(&[0.0, 2.0]), &v(&[1.0, 1.0]), &v(&[0.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::InvalidOperator(_)));
    }

    #[test]
    fn affine_examples() {
        let a = Matrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let p = project_affine(&a, &v(&[0.0]), &v(&[3.0, 5.0])).unwrap();
        assert_abs_diff_eq!(p, v(&[0.0, 5.0]), epsilon = 1e-14);
        let a = Matrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let p = project_affine(&a, &v(&[2.0]), &v(&[1.0, 1.0])).unwrap();
        assert_abs_diff_eq!(p, v(&[1.0, 1.0]), epsilon = 1e-14);
        let p = project_affine(&a, &v(&[2.0]), &v(&[3.0, 3.0])).unwrap();
        assert_abs_diff_eq!(p, v(&[1.0, 1.0]), epsilon = 1e-14);
    }

    #[test]
    fn rank_deficient_affine_rejected() {
        let a = Matrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        let err = project_affine(&a, &v(&[1.0, 2.0]), &v(&[0.0, 0.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::RankDeficient { .. }));
        let a = Matrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0 + 1e-9]);
        assert!(matches!(
            project_affine(&a, &v(&[1.0, 2.0]), &v(&[0.0, 0.0, 0.0])),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn compose_examples() {
        let id = FixedPointOperator::identity(3);
        let c = FixedPointOperator::compose(vec![id]).unwrap();
        assert_eq!(c.apply(&v(&[1.0, -2.0, 3.0])), v(&[1.0, -2.0, 3.0]));

        let h = FixedPointOperator::halfspace(v(&[1.0, 0.0]), 1.0).unwrap();
        let b = FixedPointOperator::uniform_box(2, 0.0, f64::INFINITY).unwrap();
        let c = FixedPointOperator::compose(vec![h, b]).unwrap();
        assert_eq!(c.apply(&v(&[2.0, -1.0])), v(&[1.0, 0.0]));
        assert_abs_diff_eq!(c.sqne_modulus(), 0.5);
    }

    #[test]
    fn compose_dimension_mismatch() {
        let ops = vec![
            FixedPointOperator::identity(2),
            FixedPointOperator::identity(3),
        ];
        assert!(matches!(
            FixedPointOperator::compose(ops),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(FixedPointOperator::compose(vec![]).is_err());
    }

    #[test]
    fn average_examples() {
        let ids = vec![
            FixedPointOperator::identity(2),
            FixedPointOperator::identity(2),
        ];
        let avg = FixedPointOperator::average(ids, vec![0.5, 0.5]).unwrap();
        assert_eq!(avg.apply(&v(&[4.0, 5.0])), v(&[4.0, 5.0]));

        let below = FixedPointOperator::halfspace(v(&[1.0]), 0.0).unwrap();
        let above = FixedPointOperator::halfspace(v(&[-1.0]), -2.0).unwrap();
        let avg = FixedPointOperator::average(vec![below, above], vec![0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(avg.apply(&v(&[1.0]))[0], 1.0);
    }

    #[test]
    fn average_weight_sum_checked() {
        let ids = vec![
            FixedPointOperator::identity(1),
            FixedPointOperator::identity(1),
        ];
        assert!(FixedPointOperator::average(ids.clone(), vec![0.5, 0.6]).is_err());
        assert!(FixedPointOperator::average(ids, vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn residual_examples() {
        assert_eq!(
            residual(&FixedPointOperator::identity(2), &v(&[7.0, 1.0])),
            0.0
        );
        let clamp = FixedPointOperator::uniform_box(1, 0.0, 1.0).unwrap();
        assert_eq!(residual(&clamp, &v(&[3.0])), 2.0);
        let h = FixedPointOperator::halfspace(v(&[1.0, 0.0]), 0.0).unwrap();
        assert_eq!(residual(&h, &v(&[2.0, 0.0])), 2.0);
    }

    #[test]
    fn ball_projection() {
        let ball = FixedPointOperator::ball(v(&[0.0, 0.0]), 2.0).unwrap();
        assert_abs_diff_eq!(ball.apply(&v(&[3.0, 4.0])), v(&[1.2, 1.6]), epsilon = 1e-15);
        assert_eq!(ball.apply(&v(&[1.0, 1.0])), v(&[1.0, 1.0]));
        assert!(FixedPointOperator::ball(v(&[0.0]), 0.0).is_err());
    }

    #[test]
    fn hyperplane_projection_lands_on_plane() {
        let hp = FixedPointOperator::hyperplane(v(&[1.0, 2.0]), 3.0).unwrap();
        let p = hp.apply(&v(&[-4.0, 0.5]));
        assert_abs_diff_eq!(p[0] + 2.0 * p[1], 3.0, epsilon = 1e-14);
    }
}
