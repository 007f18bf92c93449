//! Hand-built instances with known optima.

use crate::functions::{Denominator, SubdifferentiableFunction};
use crate::operators::FixedPointOperator;
use crate::program::{FractionalProgram, RatioComponent, SumOfRatiosProgram};
use crate::{Error, Matrix, Result, Vector};

/// Tags of the analytic instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnalyticTag {
    /// `x² / 1` over `[1, 2]`.
    QuadOverOne1d,
    /// `x² / x` over `[1, 2]`.
    QuadOverX1d,
    /// `((x₁−2)² + (x₂−1)² + 1) / (x₁ + 2x₂ + 1)` over
    /// `{x₁ + x₂ ≤ 2} ∩ [0, 3]²`.
    Ratio2dGrid,
}

impl AnalyticTag {
    pub const ALL: [AnalyticTag; 3] = [Self::QuadOverOne1d, Self::QuadOverX1d, Self::Ratio2dGrid];

    pub fn name(self) -> &'static str {
        match self {
            Self::QuadOverOne1d => "quad_over_one_1d",
            Self::QuadOverX1d => "quad_over_x_1d",
            Self::Ratio2dGrid => "ratio_2d_grid",
        }
    }
}

impl std::fmt::Display for AnalyticTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for AnalyticTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown analytic instance '{s}'")))
    }
}

/// Optimum of the 2-D instance, located on a grid of spacing `10⁻³` over
/// `[0, 3]²` restricted to `x₁ + x₂ ≤ 2`.
pub const RATIO_2D_GRID_ARGMIN: [f64; 2] = [1.394, 0.606];
pub const RATIO_2D_GRID_MIN: f64 = 0.4222052135330005;

/// An analytic instance together with its optimum.
#[derive(Debug, Clone)]
pub struct AnalyticInstance {
    pub tag: AnalyticTag,
    pub program: FractionalProgram,
    pub argmin: Vector,
    pub min_value: f64,
    pub start: Vector,
}

impl AnalyticInstance {
    pub fn new(tag: AnalyticTag) -> Self {
        match tag {
            AnalyticTag::QuadOverOne1d => {
                let program = FractionalProgram::new(
                    x_squared(),
                    Denominator::constant(1, 1.0),
                    unit_interval(),
                )
                .expect("dimensions agree")
                .with_upper_bound(1.0);
                Self {
                    tag,
                    program,
                    argmin: Vector::from_element(1, 1.0),
                    min_value: 1.0,
                    start: Vector::from_element(1, 3.0),
                }
            }
            AnalyticTag::QuadOverX1d => {
                let program = FractionalProgram::new(
                    x_squared(),
                    Denominator::linear(Vector::from_element(1, 1.0)),
                    unit_interval(),
                )
                .expect("dimensions agree")
                .with_upper_bound(2.0);
                Self {
                    tag,
                    program,
                    argmin: Vector::from_element(1, 1.0),
                    min_value: 1.0,
                    start: Vector::from_element(1, 2.0),
                }
            }
            AnalyticTag::Ratio2dGrid => {
                let numerator = SubdifferentiableFunction::quadratic(
                    Matrix::identity(2, 2) * 2.0,
                    Vector::from_vec(vec![-4.0, -2.0]),
                    6.0,
                )
                .expect("square")
                .with_strong_convexity(2.0);
                let program =
                    FractionalProgram::new(numerator, grid_denominator(), grid_operator())
                        .expect("dimensions agree")
                        .with_upper_bound(10.0);
                Self {
                    tag,
                    program,
                    argmin: Vector::from_row_slice(&RATIO_2D_GRID_ARGMIN),
                    min_value: RATIO_2D_GRID_MIN,
                    start: Vector::from_element(2, 0.5),
                }
            }
        }
    }

    /// Sum-of-ratios form with the same objective, for the incremental
    /// method. The 2-D instance splits the numerator per coordinate and the
    /// operator into halfspace then box; the 1-D instances have one
    /// component.
    pub fn split_program(&self) -> SumOfRatiosProgram {
        match self.tag {
            AnalyticTag::Ratio2dGrid => {
                let f1 = SubdifferentiableFunction::quadratic(
                    Matrix::from_diagonal(&Vector::from_vec(vec![2.0, 0.0])),
                    Vector::from_vec(vec![-4.0, 0.0]),
                    4.5,
                )
                .expect("square");
                let f2 = SubdifferentiableFunction::quadratic(
                    Matrix::from_diagonal(&Vector::from_vec(vec![0.0, 2.0])),
                    Vector::from_vec(vec![0.0, -2.0]),
                    1.5,
                )
                .expect("square");
                let components = vec![
                    RatioComponent {
                        numerator: f1,
                        denominator: grid_denominator(),
                        operator: grid_halfspace(),
                    },
                    RatioComponent {
                        numerator: f2,
                        denominator: grid_denominator(),
                        operator: grid_box(),
                    },
                ];
                SumOfRatiosProgram::new(components)
                    .expect("dimensions agree")
                    .with_denom_bounds(1.0, 10.0)
            }
            _ => SumOfRatiosProgram::from_single(&self.program),
        }
    }
}

pub fn gen_analytic(tag: AnalyticTag) -> AnalyticInstance {
    AnalyticInstance::new(tag)
}

fn x_squared() -> SubdifferentiableFunction {
    SubdifferentiableFunction::quadratic_form(Matrix::from_element(1, 1, 2.0))
        .expect("square")
        .with_strong_convexity(2.0)
}

fn unit_interval() -> FixedPointOperator {
    FixedPointOperator::uniform_box(1, 1.0, 2.0).expect("valid bounds")
}

fn grid_denominator() -> Denominator {
    Denominator::affine(Vector::from_vec(vec![1.0, 2.0]), 1.0)
}

fn grid_halfspace() -> FixedPointOperator {
    FixedPointOperator::halfspace(Vector::from_vec(vec![1.0, 1.0]), 2.0).expect("nonzero normal")
}

fn grid_box() -> FixedPointOperator {
    FixedPointOperator::uniform_box(2, 0.0, 3.0).expect("valid bounds")
}

fn grid_operator() -> FixedPointOperator {
    FixedPointOperator::compose(vec![grid_halfspace(), grid_box()]).expect("same dimension")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::{ratio_value, sum_ratio_value};

    #[test]
    fn tags_round_trip() {
        for tag in AnalyticTag::ALL {
            assert_eq!(tag.name().parse::<AnalyticTag>().unwrap(), tag);
        }
        assert!(matches!(
            "nope".parse::<AnalyticTag>(),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn stored_optima_evaluate() {
        for tag in AnalyticTag::ALL {
            let inst = gen_analytic(tag);
            let v = ratio_value(&inst.program, &inst.argmin).unwrap();
            assert!((v - inst.min_value).abs() <= 1e-12, "{tag}: {v}");
            assert!(inst.program.operator.residual(&inst.argmin) <= 1e-12);
        }
    }

    #[test]
    fn split_matches_joint_objective() {
        let inst = gen_analytic(AnalyticTag::Ratio2dGrid);
        let split = inst.split_program();
        for x in [[0.5, 0.5], [1.0, 0.2], [2.5, 3.0]] {
            let x = Vector::from_row_slice(&x);
            let a = ratio_value(&inst.program, &x).unwrap();
            let b = sum_ratio_value(&split, &x).unwrap();
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn grid_optimum_is_local_minimum_on_grid() {
        let inst = gen_analytic(AnalyticTag::Ratio2dGrid);
        let best = inst.min_value;
        for dx in [-1e-3, 0.0, 1e-3] {
            for dy in [-1e-3, 0.0, 1e-3] {
                let x = Vector::from_vec(vec![1.394 + dx, 0.606 + dy]);
                if x[0] + x[1] <= 2.0 + 1e-12 {
                    assert!(ratio_value(&inst.program, &x).unwrap() >= best - 1e-12);
                }
            }
        }
    }
}
