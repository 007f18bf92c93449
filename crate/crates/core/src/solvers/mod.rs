//! Fixed-point subgradient splitting methods.
//!
//! * FSSM: `xⁿ⁺¹ = T(xⁿ − ηₙ f′(xⁿ) − ηₙ θₙ h′(xⁿ))` with `θₙ = f(xⁿ)/g(xⁿ)`
//!   and `h′ ∈ ∂(−g)`.
//! * AFSSM: same direction, divided by `max{1, ‖f′ + θh′‖}` before stepping.
//! * IFSSM: one sweep over the ratios `fᵢ/gᵢ`, applying `Tᵢ` after each
//!   partial step, with every `θ_{i,n}` taken at the outer iterate.
//!
//! Each method has a single-step transition and a driver loop. Runs are
//! strictly sequential; independent runs may share a program across threads.

mod afssm;
mod diagnostics;
mod fssm;
mod ifssm;
mod schedule;
mod state;
mod stop;

pub use afssm::{afssm_run, afssm_run_with, afssm_step};
pub use diagnostics::{
    check_descent_lemma, check_incremental_descent_lemma, check_rate_bound_constant,
    IncrementalConstants, FIXED_POINT_TOL,
};
pub use fssm::{fssm_run, fssm_run_with, fssm_step};
pub use ifssm::{ifssm_run, ifssm_run_with, ifssm_step};
pub use schedule::StepSchedule;
pub use state::{
    RunOptions, RunTrace, SolverState, StepInfo, TraceConfig, TraceRow, AUTO_RECORD_MAX_DIM,
};
pub use stop::{StopRule, TerminationStatus};

pub(crate) use state::drive;

use crate::functions::{Denominator, Subdifferentiable, SubdifferentiableFunction};
use crate::program::{ratio_value, FractionalProgram, SumOfRatiosProgram};
use crate::{Error, Result, Vector};

/// `f′(x) + θ h′(x)`.
pub(crate) fn splitting_direction(
    numerator: &SubdifferentiableFunction,
    denominator: &Denominator,
    x: &Vector,
    theta: f64,
    iteration: usize,
) -> Result<Vector> {
    let mut d = numerator.subgradient(x)?;
    let h = denominator.neg_subgradient(x)?;
    if d.iter().chain(h.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "subgradient",
            iteration,
        });
    }
    d.axpy(theta, &h, 1.0);
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "search direction",
            iteration,
        });
    }
    Ok(d)
}

pub(crate) fn check_step(eta: f64) -> Result<()> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::Misuse(format!(
            "step size {eta} must be finite and nonnegative"
        )));
    }
    Ok(())
}

fn check_start(dim: usize, x: &Vector) -> Result<()> {
    if x.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: x.len(),
        });
    }
    Ok(())
}

impl SolverState {
    /// Starting state `x¹` with `θ₁ = f(x¹)/g(x¹)`; requires `g(x¹) > 0`.
    pub fn for_program(p: &FractionalProgram, x1: Vector) -> Result<Self> {
        check_start(p.dim(), &x1)?;
        let theta = ratio_value(p, &x1)?;
        Ok(Self::new(x1, theta))
    }

    /// Starting state for a sum of ratios; requires every `gᵢ(x¹) > 0`.
    pub fn for_sum(p: &SumOfRatiosProgram, x1: Vector) -> Result<Self> {
        check_start(p.dim(), &x1)?;
        let thetas = p.ratios(&x1)?;
        let mut state = Self::new(x1, thetas.iter().sum());
        state.component_thetas = thetas;
        Ok(state)
    }
}
