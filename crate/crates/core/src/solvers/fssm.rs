use super::{
    check_step, drive, splitting_direction, RunOptions, RunTrace, SolverState, StepInfo,
    StepSchedule, StopRule, TraceConfig,
};
use crate::program::{ratio_value, FractionalProgram};
use crate::{Result, Vector};

/// One FSSM transition `xⁿ ↦ T(xⁿ − η(f′(xⁿ) + θₙh′(xⁿ)))`.
///
/// `θₙ` is the value cached in `state`; `θₙ₊₁` is evaluated at the new
/// iterate, which fails if the denominator is not positive there.
pub fn fssm_step(p: &FractionalProgram, state: &SolverState, eta: f64) -> Result<SolverState> {
    check_step(eta)?;
    let d = splitting_direction(&p.numerator, &p.denominator, &state.x, state.theta, state.n)?;
    let mut y = state.x.clone();
    y.axpy(-eta, &d, 1.0);
    let x_next = p.operator.apply(&y);
    let theta_next = ratio_value(p, &x_next)?;
    let info = StepInfo {
        eta,
        direction_norm_sq: d.norm_squared(),
        inner_displacement_sq: (&x_next - &state.x).norm_squared(),
        pre_image: y,
    };
    Ok(state.advance(x_next, theta_next, info))
}

pub fn fssm_run(
    p: &FractionalProgram,
    x1: Vector,
    schedule: &StepSchedule,
    stop: &StopRule,
) -> Result<(SolverState, RunTrace)> {
    fssm_run_with(p, x1, schedule, stop, &RunOptions::default())
}

pub fn fssm_run_with(
    p: &FractionalProgram,
    x1: Vector,
    schedule: &StepSchedule,
    stop: &StopRule,
    options: &RunOptions,
) -> Result<(SolverState, RunTrace)> {
    let initial = SolverState::for_program(p, x1)?;
    let config = TraceConfig {
        method: "fssm".into(),
        schedule: Some(*schedule),
        ..TraceConfig::default()
    };
    drive(
        initial,
        |n| schedule.step(n),
        stop,
        options,
        config,
        |x| (p.operator.residual(x), p.feasibility_at(x)),
        |state, eta| fssm_step(p, state, eta),
    )
}
