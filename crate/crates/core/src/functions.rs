//! Value and subgradient oracles for numerators and denominators.
//!
//! Numerators are convex [`SubdifferentiableFunction`]s. A denominator `g`
//! is concave, so it is stored as the convex function `−g` inside a
//! [`Denominator`]; the solvers need `g(x)` and one `h′ ∈ ∂(−g)(x)`, which is
//! exactly what that representation hands out.

use crate::{Error, Matrix, Result, Vector};

/// Anything with a value oracle and a one-subgradient oracle.
pub trait Subdifferentiable {
    fn value(&self, x: &Vector) -> Result<f64>;
    fn subgradient(&self, x: &Vector) -> Result<Vector>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConvexityClass {
    Convex,
    /// `⟨f′(x) − f′(y), x − y⟩ ≥ σ‖x − y‖²`.
    StronglyConvex(f64),
}

impl ConvexityClass {
    pub fn strong_convexity_modulus(&self) -> Option<f64> {
        match *self {
            ConvexityClass::Convex => None,
            ConvexityClass::StronglyConvex(sigma) => Some(sigma),
        }
    }
}

#[derive(Debug, Clone)]
pub enum FunctionKind {
    /// `⟨s, x⟩`.
    Linear { coeffs: Vector },
    /// `⟨s, x⟩ + c`.
    Affine { coeffs: Vector, offset: f64 },
    /// `½⟨x, Qx⟩ + ⟨c, x⟩ + r` with symmetric `Q ⪰ 0`.
    QuadraticForm {
        q: Matrix,
        linear: Vector,
        constant: f64,
    },
    /// `−a₀ Πⱼ xⱼ^{aⱼ}` with `aⱼ > 0`, `Σ aⱼ ≤ 1`; defined for `x > 0`.
    NegCobbDouglas { scale: f64, exponents: Vector },
}

/// A convex function with value and subgradient oracles.
#[derive(Debug, Clone)]
pub struct SubdifferentiableFunction {
    kind: FunctionKind,
    class: ConvexityClass,
}

impl SubdifferentiableFunction {
    pub fn linear(coeffs: Vector) -> Self {
        Self {
            kind: FunctionKind::Linear { coeffs },
            class: ConvexityClass::Convex,
        }
    }

    pub fn affine(coeffs: Vector, offset: f64) -> Self {
        Self {
            kind: FunctionKind::Affine { coeffs, offset },
            class: ConvexityClass::Convex,
        }
    }

    /// `½⟨x, Qx⟩`. `Q` is symmetrized; the class is plain convex unless
    /// [`Self::with_strong_convexity`] is used.
    pub fn quadratic_form(q: Matrix) -> Result<Self> {
        let dim = q.nrows();
        Self::quadratic(q, Vector::zeros(dim), 0.0)
    }

    /// `½⟨x, Qx⟩ + ⟨c, x⟩ + r`.
    pub fn quadratic(q: Matrix, linear: Vector, constant: f64) -> Result<Self> {
        if !q.is_square() {
            return Err(Error::Domain(format!(
                "Q must be square, got {:?}",
                q.shape()
            )));
        }
        if linear.len() != q.nrows() {
            return Err(Error::DimensionMismatch {
                expected: q.nrows(),
                got: linear.len(),
            });
        }
        let q = (&q + q.transpose()) * 0.5;
        Ok(Self {
            kind: FunctionKind::QuadraticForm {
                q,
                linear,
                constant,
            },
            class: ConvexityClass::Convex,
        })
    }

    /// `−a₀ Π xⱼ^{aⱼ}`, the negation of a Cobb–Douglas production function.
    pub fn neg_cobb_douglas(scale: f64, exponents: Vector) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::Domain(format!(
                "Cobb-Douglas scale {scale} must be positive"
            )));
        }
        if exponents.iter().any(|&a| !(a > 0.0)) {
            return Err(Error::Domain(
                "Cobb-Douglas exponents must be positive".into(),
            ));
        }
        let total: f64 = exponents.sum();
        if total > 1.0 + 1e-12 {
            return Err(Error::Domain(format!(
                "Cobb-Douglas exponents sum to {total} > 1; the function is not concave"
            )));
        }
        Ok(Self {
            kind: FunctionKind::NegCobbDouglas { scale, exponents },
            class: ConvexityClass::Convex,
        })
    }

    /// Tags the function as σ-strongly convex. The caller vouches for σ.
    pub fn with_strong_convexity(mut self, sigma: f64) -> Self {
        self.class = ConvexityClass::StronglyConvex(sigma);
        self
    }

    pub fn kind(&self) -> &FunctionKind {
        &self.kind
    }

    pub fn class(&self) -> ConvexityClass {
        self.class
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            FunctionKind::Linear { coeffs } | FunctionKind::Affine { coeffs, .. } => coeffs.len(),
            FunctionKind::QuadraticForm { q, .. } => q.nrows(),
            FunctionKind::NegCobbDouglas { exponents, .. } => exponents.len(),
        }
    }

    fn check_dim(&self, x: &Vector) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    fn check_positive(x: &Vector) -> Result<()> {
        if let Some(j) = x.iter().position(|&v| !(v > 0.0)) {
            return Err(Error::Domain(format!(
                "Cobb-Douglas needs x > 0, got x[{j}] = {}",
                x[j]
            )));
        }
        Ok(())
    }
}

impl Subdifferentiable for SubdifferentiableFunction {
    fn value(&self, x: &Vector) -> Result<f64> {
        self.check_dim(x)?;
        Ok(match &self.kind {
            FunctionKind::Linear { coeffs } => coeffs.dot(x),
            FunctionKind::Affine { coeffs, offset } => coeffs.dot(x) + offset,
            FunctionKind::QuadraticForm {
                q,
                linear,
                constant,
            } => 0.5 * x.dot(&(q * x)) + linear.dot(x) + constant,
            FunctionKind::NegCobbDouglas { scale, exponents } => {
                Self::check_positive(x)?;
                -scale * cobb_douglas_product(exponents, x)
            }
        })
    }

    fn subgradient(&self, x: &Vector) -> Result<Vector> {
        self.check_dim(x)?;
        Ok(match &self.kind {
            FunctionKind::Linear { coeffs } | FunctionKind::Affine { coeffs, .. } => coeffs.clone(),
            FunctionKind::QuadraticForm { q, linear, .. } => q * x + linear,
            FunctionKind::NegCobbDouglas { scale, exponents } => {
                Self::check_positive(x)?;
                let value = scale * cobb_douglas_product(exponents, x);
                Vector::from_fn(x.len(), |j, _| -value * exponents[j] / x[j])
            }
        })
    }
}

// Π xⱼ^{aⱼ} through logarithms; stays finite for large k.
fn cobb_douglas_product(exponents: &Vector, x: &Vector) -> f64 {
    exponents
        .iter()
        .zip(x.iter())
        .map(|(a, xj)| a * xj.ln())
        .sum::<f64>()
        .exp()
}

/// A concave denominator `g`, stored as the convex function `−g`.
#[derive(Debug, Clone)]
pub struct Denominator {
    negated: SubdifferentiableFunction,
}

impl Denominator {
    /// Wraps a convex function `φ`, giving the denominator `g = −φ`.
    pub fn from_negated(negated: SubdifferentiableFunction) -> Self {
        Self { negated }
    }

    /// `g(x) = ⟨s, x⟩`.
    pub fn linear(coeffs: Vector) -> Self {
        Self::from_negated(SubdifferentiableFunction::linear(-coeffs))
    }

    /// `g(x) = ⟨d, x⟩ + s`.
    pub fn affine(coeffs: Vector, offset: f64) -> Self {
        Self::from_negated(SubdifferentiableFunction::affine(-coeffs, -offset))
    }

    /// `g(x) ≡ c`.
    pub fn constant(dim: usize, c: f64) -> Self {
        Self::affine(Vector::zeros(dim), c)
    }

    /// `g(x) = a₀ Π xⱼ^{aⱼ}`.
    pub fn cobb_douglas(scale: f64, exponents: Vector) -> Result<Self> {
        Ok(Self::from_negated(
            SubdifferentiableFunction::neg_cobb_douglas(scale, exponents)?,
        ))
    }

    pub fn negated(&self) -> &SubdifferentiableFunction {
        &self.negated
    }

    pub fn dim(&self) -> usize {
        self.negated.dim()
    }

    /// `g(x)`.
    pub fn value(&self, x: &Vector) -> Result<f64> {
        Ok(-self.negated.value(x)?)
    }

    /// One element `h′(x)` of `∂(−g)(x)`.
    pub fn neg_subgradient(&self, x: &Vector) -> Result<Vector> {
        self.negated.subgradient(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    #[test]
    fn value_examples() {
        let quad = SubdifferentiableFunction::quadratic_form(Matrix::identity(2, 2)).unwrap();
        assert_eq!(quad.value(&v(&[1.0, 1.0])).unwrap(), 1.0);
        let lin = SubdifferentiableFunction::linear(v(&[2.0, 3.0]));
        assert_eq!(lin.value(&v(&[1.0, 1.0])).unwrap(), 5.0);
        let cd = SubdifferentiableFunction::neg_cobb_douglas(1.0, v(&[0.5, 0.5])).unwrap();
        assert_abs_diff_eq!(cd.value(&v(&[4.0, 9.0])).unwrap(), -6.0, epsilon = 1e-14);
    }

    #[test]
    fn subgradient_examples() {
        let quad = SubdifferentiableFunction::quadratic_form(Matrix::identity(2, 2)).unwrap();
        assert_eq!(quad.subgradient(&v(&[1.0, 2.0])).unwrap(), v(&[1.0, 2.0]));
        let lin = SubdifferentiableFunction::linear(v(&[2.0, 3.0]));
        assert_eq!(lin.subgradient(&v(&[-7.0, 0.1])).unwrap(), v(&[2.0, 3.0]));
        let cd = SubdifferentiableFunction::neg_cobb_douglas(1.0, v(&[0.5, 0.5])).unwrap();
        let g = cd.subgradient(&v(&[4.0, 9.0])).unwrap();
        assert_abs_diff_eq!(g[0], -0.75, epsilon = 1e-14);
        assert_abs_diff_eq!(g[1], -1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn cobb_douglas_domain_guard() {
        let cd = SubdifferentiableFunction::neg_cobb_douglas(2.0, v(&[0.3, 0.7])).unwrap();
        assert!(matches!(cd.value(&v(&[1.0, 0.0])), Err(Error::Domain(_))));
        assert!(matches!(
            cd.subgradient(&v(&[-1.0, 1.0])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn cobb_douglas_rejects_bad_parameters() {
        assert!(SubdifferentiableFunction::neg_cobb_douglas(0.0, v(&[0.5])).is_err());
        assert!(SubdifferentiableFunction::neg_cobb_douglas(1.0, v(&[0.5, 0.0])).is_err());
        assert!(SubdifferentiableFunction::neg_cobb_douglas(1.0, v(&[0.8, 0.8])).is_err());
    }

    #[test]
    fn denominator_signs() {
        let g = Denominator::linear(v(&[1.0, 2.0]));
        assert_eq!(g.value(&v(&[1.0, 1.0])).unwrap(), 3.0);
        assert_eq!(
            g.neg_subgradient(&v(&[1.0, 1.0])).unwrap(),
            v(&[-1.0, -2.0])
        );
        let one = Denominator::constant(3, 1.0);
        assert_eq!(one.value(&v(&[5.0, 6.0, 7.0])).unwrap(), 1.0);
        assert_eq!(
            one.neg_subgradient(&v(&[5.0, 6.0, 7.0])).unwrap(),
            Vector::zeros(3)
        );
    }

    #[test]
    fn dimension_checked() {
        let lin = SubdifferentiableFunction::linear(v(&[2.0, 3.0]));
        assert!(matches!(
            lin.value(&v(&[1.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn quadratic_is_symmetrized() {
        let q = Matrix::from_row_slice(2, 2, &[2.0, 2.0, 0.0, 2.0]);
        let f = SubdifferentiableFunction::quadratic_form(q).unwrap();
        // ½(2x² + 2xy + 2y²) has gradient (2x + y, x + 2y)
        assert_eq!(f.subgradient(&v(&[1.0, 1.0])).unwrap(), v(&[3.0, 3.0]));
    }
}
