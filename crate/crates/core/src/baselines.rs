//! Comparison machinery: Dinkelbach's parametric method, the hybrid steepest
//! descent method (HSDM) used as its inner solver, and Halpern iteration for
//! approximate projections onto `Fix T`.

use crate::functions::Subdifferentiable;
use crate::operators::FixedPointOperator;
use crate::program::{ratio_value, FractionalProgram, ParametricObjective};
use crate::solvers::{drive, RunOptions, RunTrace, SolverState, StepInfo, StopRule, TraceConfig};
use crate::{Error, Result, Vector};

/// Default inner-loop budget of the nested baselines.
pub const DEFAULT_INNER_ITERS: usize = 10;

/// Inner step rule `(j, θₙ) ↦ αⱼ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaRule {
    Constant(f64),
    /// `c / (1 + θₙ)`, constant within one inner loop.
    ThetaScaled(f64),
    /// `c / (j + 1)`.
    Harmonic(f64),
}

impl AlphaRule {
    pub fn alpha(&self, j: usize, theta: f64) -> f64 {
        match *self {
            AlphaRule::Constant(c) => c,
            AlphaRule::ThetaScaled(c) => c / (1.0 + theta),
            AlphaRule::Harmonic(c) => c / (j as f64 + 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerLoopConfig {
    pub inner_iters: usize,
    pub alpha_rule: AlphaRule,
}

impl Default for InnerLoopConfig {
    fn default() -> Self {
        Self {
            inner_iters: DEFAULT_INNER_ITERS,
            alpha_rule: AlphaRule::ThetaScaled(3e-6),
        }
    }
}

impl InnerLoopConfig {
    pub fn validate(&self) -> Result<()> {
        if self.inner_iters == 0 {
            return Err(Error::Config("inner_iters must be at least 1".into()));
        }
        let c = match self.alpha_rule {
            AlphaRule::Constant(c) | AlphaRule::ThetaScaled(c) | AlphaRule::Harmonic(c) => c,
        };
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Config(format!("alpha scale {c} must be positive")));
        }
        Ok(())
    }
}

/// HSDM: `uʲ⁺¹ = T(uʲ) − αⱼ φ′(T(uʲ))` for `j = 1..iters`; returns `u^{iters+1}`.
pub fn hsdm_run<F>(
    op: &FixedPointOperator,
    phi: &F,
    u1: &Vector,
    alphas: impl Fn(usize) -> f64,
    iters: usize,
) -> Result<Vector>
where
    F: Subdifferentiable + ?Sized,
{
    let mut u = u1.clone();
    for j in 1..=iters {
        let alpha = alphas(j);
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::Misuse(format!("HSDM step alpha_{j} = {alpha}")));
        }
        let mut t = op.try_apply(&u)?;
        let grad = phi.subgradient(&t)?;
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite {
                what: "HSDM subgradient",
                iteration: j,
            });
        }
        t.axpy(-alpha, &grad, 1.0);
        u = t;
    }
    Ok(u)
}

/// Halpern iteration anchored at `z`, started from `u¹ = z`.
pub fn halpern_project(
    op: &FixedPointOperator,
    z: &Vector,
    lambdas: impl Fn(usize) -> f64,
    iters: usize,
) -> Result<Vector> {
    halpern_project_from(op, z, z, lambdas, iters)
}

/// `uˢ⁺¹ = λₛ z + (1 − λₛ) T(uˢ)`, `s = 1..iters`. With `λₛ = 1/(s+1)` and
/// nonexpansive `T` this converges to the projection of `z` onto `Fix T`.
pub fn halpern_project_from(
    op: &FixedPointOperator,
    anchor: &Vector,
    u1: &Vector,
    lambdas: impl Fn(usize) -> f64,
    iters: usize,
) -> Result<Vector> {
    let mut u = u1.clone();
    for s in 1..=iters {
        let lambda = lambdas(s);
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::Misuse(format!(
                "Halpern weight lambda_{s} = {lambda} outside (0, 1]"
            )));
        }
        let mut next = op.try_apply(&u)?;
        next *= 1.0 - lambda;
        next.axpy(lambda, anchor, 1.0);
        u = next;
    }
    Ok(u)
}

/// Solves (approximately) `min_{x ∈ Fix T} f(x) − θ g(x)`.
pub trait SubproblemSolver: Sync {
    /// Returns the new point and the inner step size used (0 if none).
    fn solve(&self, p: &FractionalProgram, theta: f64, warm: &Vector) -> Result<(Vector, f64)>;
    fn name(&self) -> &'static str;
}

/// A fixed budget of HSDM steps warm-started at the previous outer iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsdmSubproblem(pub InnerLoopConfig);

impl SubproblemSolver for HsdmSubproblem {
    fn solve(&self, p: &FractionalProgram, theta: f64, warm: &Vector) -> Result<(Vector, f64)> {
        let phi = ParametricObjective::new(p, theta);
        let rule = self.0.alpha_rule;
        let x = hsdm_run(
            &p.operator,
            &phi,
            warm,
            |j| rule.alpha(j, theta),
            self.0.inner_iters,
        )?;
        Ok((x, rule.alpha(1, theta)))
    }

    fn name(&self) -> &'static str {
        "hsdm"
    }
}

/// Exact solve for one-dimensional programs whose feasible set is `[lo, hi]`,
/// by bisection on the derivative of the convex subproblem objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalSubproblem {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
}

impl SubproblemSolver for IntervalSubproblem {
    fn solve(&self, p: &FractionalProgram, theta: f64, _warm: &Vector) -> Result<(Vector, f64)> {
        if p.dim() != 1 {
            return Err(Error::Misuse(
                "interval subproblem solver is one-dimensional".into(),
            ));
        }
        let phi = ParametricObjective::new(p, theta);
        let slope =
            |x: f64| -> Result<f64> { Ok(phi.subgradient(&Vector::from_element(1, x))?[0]) };
        let (mut lo, mut hi) = (self.lo, self.hi);
        let x = if slope(lo)? >= 0.0 {
            lo
        } else if slope(hi)? <= 0.0 {
            hi
        } else {
            while hi - lo > self.tol {
                let mid = 0.5 * (lo + hi);
                if slope(mid)? > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        };
        Ok((Vector::from_element(1, x), 0.0))
    }

    fn name(&self) -> &'static str {
        "interval"
    }
}

/// Dinkelbach's method with HSDM inner solves.
pub fn dinkelbach_run(
    p: &FractionalProgram,
    x1: Vector,
    cfg: &InnerLoopConfig,
    outer_stop: &StopRule,
) -> Result<(SolverState, RunTrace)> {
    cfg.validate()?;
    dinkelbach_run_with(
        p,
        x1,
        &HsdmSubproblem(*cfg),
        outer_stop,
        &RunOptions::default(),
    )
}

/// Dinkelbach's method: `xⁿ⁺¹ ≈ argmin_{Fix T} f − θₙg`, `θₙ₊₁ = f(xⁿ⁺¹)/g(xⁿ⁺¹)`.
pub fn dinkelbach_run_with(
    p: &FractionalProgram,
    x1: Vector,
    inner: &dyn SubproblemSolver,
    outer_stop: &StopRule,
    options: &RunOptions,
) -> Result<(SolverState, RunTrace)> {
    let initial = SolverState::for_program(p, x1)?;
    let config = TraceConfig {
        method: "dinkelbach".into(),
        extra: vec![("inner".into(), inner.name().into())],
        ..TraceConfig::default()
    };
    drive(
        initial,
        |_| 0.0,
        outer_stop,
        options,
        config,
        |x| (p.operator.residual(x), p.feasibility_at(x)),
        |state, _| {
            let phi = ParametricObjective::new(p, state.theta);
            let direction = phi.subgradient(&state.x)?;
            let (x_next, alpha) = inner.solve(p, state.theta, &state.x)?;
            let theta_next = ratio_value(p, &x_next)?;
            let info = StepInfo {
                eta: alpha,
                direction_norm_sq: direction.norm_squared(),
                inner_displacement_sq: (&x_next - &state.x).norm_squared(),
                pre_image: state.x.clone(),
            };
            Ok(state.advance(x_next, theta_next, info))
        },
    )
}
