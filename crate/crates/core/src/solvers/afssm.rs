use super::{
    check_step, drive, splitting_direction, RunOptions, RunTrace, SolverState, StepInfo,
    StepSchedule, StopRule, TraceConfig,
};
use crate::functions::ConvexityClass;
use crate::program::{ratio_value, FractionalProgram};
use crate::{Result, Vector};

/// One AFSSM transition: the FSSM direction is divided by `max{1, ‖d‖}`,
/// so `‖xⁿ − uⁿ‖ ≤ η` always holds.
pub fn afssm_step(p: &FractionalProgram, state: &SolverState, eta: f64) -> Result<SolverState> {
    check_step(eta)?;
    let d = splitting_direction(&p.numerator, &p.denominator, &state.x, state.theta, state.n)?;
    let norm_sq = d.norm_squared();
    let scale = norm_sq.sqrt().max(1.0);
    let mut u = state.x.clone();
    u.axpy(-eta, &(d / scale), 1.0);
    let x_next = p.operator.apply(&u);
    let theta_next = ratio_value(p, &x_next)?;
    let info = StepInfo {
        eta,
        direction_norm_sq: norm_sq,
        inner_displacement_sq: (&x_next - &state.x).norm_squared(),
        pre_image: u,
    };
    Ok(state.advance(x_next, theta_next, info))
}

pub fn afssm_run(
    p: &FractionalProgram,
    x1: Vector,
    schedule: &StepSchedule,
    stop: &StopRule,
) -> Result<(SolverState, RunTrace)> {
    afssm_run_with(p, x1, schedule, stop, &RunOptions::default())
}

pub fn afssm_run_with(
    p: &FractionalProgram,
    x1: Vector,
    schedule: &StepSchedule,
    stop: &StopRule,
    options: &RunOptions,
) -> Result<(SolverState, RunTrace)> {
    if p.numerator.class() == ConvexityClass::Convex {
        log::warn!("AFSSM convergence needs a strongly convex numerator; running anyway");
    }
    let initial = SolverState::for_program(p, x1)?;
    let config = TraceConfig {
        method: "afssm".into(),
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
        |state, eta| afssm_step(p, state, eta),
    )
}
