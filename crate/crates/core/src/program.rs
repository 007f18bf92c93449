//! Problem bundles: a single ratio over `Fix T`, and a sum of ratios over
//! `∩ Fix Tᵢ`.

use crate::functions::{Denominator, Subdifferentiable, SubdifferentiableFunction};
use crate::harness::metrics::metric_fe_halfspaces;
use crate::operators::FixedPointOperator;
use crate::{Error, Matrix, Result, Vector};

/// How constraint violation is reported in traces.
#[derive(Debug, Clone, Default)]
pub enum FeasibilityMeasure {
    /// `‖T(x) − x‖` of the program's operator.
    #[default]
    OperatorResidual,
    /// `‖Ax − b‖`.
    LinearSystem { matrix: Matrix, rhs: Vector },
    /// Funding-level feasibility error over `q̲ₗ ≤ ⟨bₗ, x⟩ ≤ q̄ₗ`.
    FundingLevels {
        rows: Matrix,
        lower: Vector,
        upper: Vector,
    },
    /// Largest violation of `Ax ≤ b`.
    Inequalities { matrix: Matrix, rhs: Vector },
}

impl FeasibilityMeasure {
    pub fn evaluate(&self, op: &FixedPointOperator, x: &Vector) -> f64 {
        match self {
            FeasibilityMeasure::OperatorResidual => op.residual(x),
            FeasibilityMeasure::LinearSystem { matrix, rhs } => (matrix * x - rhs).norm(),
            FeasibilityMeasure::FundingLevels { rows, lower, upper } => {
                metric_fe_halfspaces(rows, lower, upper, x)
            }
            FeasibilityMeasure::Inequalities { matrix, rhs } => (matrix * x - rhs)
                .iter()
                .fold(0.0, |acc: f64, &r| acc.max(r)),
        }
    }
}

/// `min f(x)/g(x)` subject to `x ∈ Fix T`.
#[derive(Debug, Clone)]
pub struct FractionalProgram {
    pub numerator: SubdifferentiableFunction,
    pub denominator: Denominator,
    pub operator: FixedPointOperator,
    /// Upper bound `M` on `g` over `Im T`, when known.
    pub denom_upper_bound: Option<f64>,
    pub feasibility: FeasibilityMeasure,
}

impl FractionalProgram {
    pub fn new(
        numerator: SubdifferentiableFunction,
        denominator: Denominator,
        operator: FixedPointOperator,
    ) -> Result<Self> {
        let k = operator.dim();
        for got in [numerator.dim(), denominator.dim()] {
            if got != k {
                return Err(Error::DimensionMismatch { expected: k, got });
            }
        }
        Ok(Self {
            numerator,
            denominator,
            operator,
            denom_upper_bound: None,
            feasibility: FeasibilityMeasure::OperatorResidual,
        })
    }

    pub fn with_upper_bound(mut self, m: f64) -> Self {
        self.denom_upper_bound = Some(m);
        self
    }

    pub fn with_feasibility(mut self, feasibility: FeasibilityMeasure) -> Self {
        self.feasibility = feasibility;
        self
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    /// `g(x)`, failing when it is not strictly positive.
    pub fn positive_denominator(&self, x: &Vector) -> Result<f64> {
        positive(&self.denominator, 0, x)
    }

    pub fn feasibility_at(&self, x: &Vector) -> f64 {
        self.feasibility.evaluate(&self.operator, x)
    }
}

fn positive(g: &Denominator, component: usize, x: &Vector) -> Result<f64> {
    let value = g.value(x)?;
    if !(value > 0.0) {
        return Err(Error::DenominatorViolation {
            component,
            value,
            x: x.iter().cloned().collect(),
        });
    }
    Ok(value)
}

/// `θ = f(x)/g(x)`.
pub fn ratio_value(p: &FractionalProgram, x: &Vector) -> Result<f64> {
    let g = p.positive_denominator(x)?;
    Ok(p.numerator.value(x)? / g)
}

/// `f − θg`, the parametric subproblem objective of Dinkelbach's method.
/// Convex whenever `θ ≥ 0`.
#[derive(Debug, Clone, Copy)]
pub struct ParametricObjective<'a> {
    pub numerator: &'a SubdifferentiableFunction,
    pub denominator: &'a Denominator,
    pub theta: f64,
}

impl<'a> ParametricObjective<'a> {
    pub fn new(p: &'a FractionalProgram, theta: f64) -> Self {
        Self {
            numerator: &p.numerator,
            denominator: &p.denominator,
            theta,
        }
    }
}

impl Subdifferentiable for ParametricObjective<'_> {
    fn value(&self, x: &Vector) -> Result<f64> {
        Ok(self.numerator.value(x)? - self.theta * self.denominator.value(x)?)
    }

    fn subgradient(&self, x: &Vector) -> Result<Vector> {
        let mut d = self.numerator.subgradient(x)?;
        d.axpy(self.theta, &self.denominator.neg_subgradient(x)?, 1.0);
        Ok(d)
    }
}

/// One term `fᵢ/gᵢ` of a sum-of-ratios program with its operator `Tᵢ`.
#[derive(Debug, Clone)]
pub struct RatioComponent {
    pub numerator: SubdifferentiableFunction,
    pub denominator: Denominator,
    pub operator: FixedPointOperator,
}

/// `min Σ fᵢ(x)/gᵢ(x)` subject to `x ∈ ∩ Fix Tᵢ`.
#[derive(Debug, Clone)]
pub struct SumOfRatiosProgram {
    pub components: Vec<RatioComponent>,
    /// `(N, M)` with `0 < N ≤ gᵢ ≤ M`, when known.
    pub denom_bounds: Option<(f64, f64)>,
    pub feasibility: FeasibilityMeasure,
    /// Operator used for the feasibility residual; defaults to `T_m ∘ … ∘ T₁`.
    pub joint_operator: FixedPointOperator,
}

impl SumOfRatiosProgram {
    pub fn new(components: Vec<RatioComponent>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidSpec("sum of ratios needs m >= 1".into()))?;
        let k = first.operator.dim();
        for c in &components {
            for got in [c.operator.dim(), c.numerator.dim(), c.denominator.dim()] {
                if got != k {
                    return Err(Error::DimensionMismatch { expected: k, got });
                }
            }
        }
        let joint_operator =
            FixedPointOperator::compose(components.iter().map(|c| c.operator.clone()).collect())?;
        Ok(Self {
            components,
            denom_bounds: None,
            feasibility: FeasibilityMeasure::OperatorResidual,
            joint_operator,
        })
    }

    /// Records `(N, M)`. Warns when `m + N ≤ M` fails; the bound is metadata
    /// only and nothing downstream relies on it holding.
    pub fn with_denom_bounds(mut self, lower: f64, upper: f64) -> Self {
        let m = self.components.len() as f64;
        if m + lower > upper {
            log::warn!("denominator bounds violate m + N <= M: m = {m}, N = {lower}, M = {upper}");
        }
        self.denom_bounds = Some((lower, upper));
        self
    }

    pub fn with_feasibility(mut self, feasibility: FeasibilityMeasure) -> Self {
        self.feasibility = feasibility;
        self
    }

    /// The single-ratio program viewed as a sum with `m = 1`.
    pub fn from_single(p: &FractionalProgram) -> Self {
        Self {
            components: vec![RatioComponent {
                numerator: p.numerator.clone(),
                denominator: p.denominator.clone(),
                operator: p.operator.clone(),
            }],
            denom_bounds: p.denom_upper_bound.map(|m| (0.0, m)),
            feasibility: p.feasibility.clone(),
            joint_operator: p.operator.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.joint_operator.dim()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// All ratios `θᵢ = fᵢ(x)/gᵢ(x)`, failing on the first nonpositive `gᵢ`.
    pub fn ratios(&self, x: &Vector) -> Result<Vec<f64>> {
        self.components
            .iter()
            .enumerate()
            .map(|(i, c)| Ok(c.numerator.value(x)? / positive(&c.denominator, i, x)?))
            .collect()
    }

    pub fn feasibility_at(&self, x: &Vector) -> f64 {
        self.feasibility.evaluate(&self.joint_operator, x)
    }
}

/// `F(x) = Σ fᵢ(x)/gᵢ(x)`.
pub fn sum_ratio_value(p: &SumOfRatiosProgram, x: &Vector) -> Result<f64> {
    Ok(p.ratios(x)?.iter().sum())
}
