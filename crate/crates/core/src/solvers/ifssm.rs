use super::{
    check_step, drive, splitting_direction, RunOptions, RunTrace, SolverState, StepInfo,
    StepSchedule, StopRule, TraceConfig,
};
use crate::program::SumOfRatiosProgram;
use crate::{Result, Vector};

/// One IFSSM sweep `x^{0,n} = xⁿ`, `x^{i,n} = Tᵢ(x^{i−1,n} − η fᵢ′ − η θ_{i,n} hᵢ′)`.
///
/// The ratios `θ_{i,n}` are all taken at the outer iterate `xⁿ`, while the
/// subgradients are taken at the inner point `x^{i−1,n}`.
pub fn ifssm_step(p: &SumOfRatiosProgram, state: &SolverState, eta: f64) -> Result<SolverState> {
    check_step(eta)?;
    let thetas = if state.component_thetas.len() == p.len() {
        state.component_thetas.clone()
    } else {
        p.ratios(&state.x)?
    };
    let mut x = state.x.clone();
    let mut pre_image = x.clone();
    let mut displacement = 0.0;
    let mut direction_norm_sq: f64 = 0.0;
    for (c, &theta) in p.components.iter().zip(&thetas) {
        let d = splitting_direction(&c.numerator, &c.denominator, &x, theta, state.n)?;
        let mut v = x.clone();
        v.axpy(-eta, &d, 1.0);
        let x_next = c.operator.apply(&v);
        displacement += (&x_next - &x).norm_squared();
        direction_norm_sq = direction_norm_sq.max(d.norm_squared());
        pre_image = v;
        x = x_next;
    }
    let next_thetas = p.ratios(&x)?;
    let info = StepInfo {
        eta,
        pre_image,
        direction_norm_sq,
        inner_displacement_sq: displacement,
    };
    let mut next = state.advance(x, next_thetas.iter().sum(), info);
    next.component_thetas = next_thetas;
    Ok(next)
}

pub fn ifssm_run(
    p: &SumOfRatiosProgram,
    x1: Vector,
    schedule: &StepSchedule,
    stop: &StopRule,
) -> Result<(SolverState, RunTrace)> {
    ifssm_run_with(p, x1, schedule, stop, &RunOptions::default())
}

pub fn ifssm_run_with(
    p: &SumOfRatiosProgram,
    x1: Vector,
    schedule: &StepSchedule,
    stop: &StopRule,
    options: &RunOptions,
) -> Result<(SolverState, RunTrace)> {
    let initial = SolverState::for_sum(p, x1)?;
    let config = TraceConfig {
        method: "ifssm".into(),
        schedule: Some(*schedule),
        ..TraceConfig::default()
    };
    drive(
        initial,
        |n| schedule.step(n),
        stop,
        options,
        config,
        |x| (p.joint_operator.residual(x), p.feasibility_at(x)),
        |state, eta| ifssm_step(p, state, eta),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{Denominator, SubdifferentiableFunction};
    use crate::operators::FixedPointOperator;
    use crate::program::RatioComponent;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    fn linear_term(c: f64) -> RatioComponent {
        RatioComponent {
            numerator: SubdifferentiableFunction::linear(v(&[c])),
            denominator: Denominator::constant(1, 1.0),
            operator: FixedPointOperator::uniform_box(1, 0.0, 10.0).unwrap(),
        }
    }

    #[test]
    fn hand_traced_sweep() {
        let p = SumOfRatiosProgram::new(vec![linear_term(1.0), linear_term(2.0)]).unwrap();
        let s1 = SolverState::for_sum(&p, v(&[5.0])).unwrap();
        assert_eq!(s1.component_thetas, vec![5.0, 10.0]);
        let s2 = ifssm_step(&p, &s1, 1.0).unwrap();
        assert_eq!(s2.x, v(&[2.0]));
        assert_eq!(s2.theta, 6.0);
        // (4 − 5)² + (2 − 4)²
        assert_eq!(s2.last_step.unwrap().inner_displacement_sq, 5.0);
    }

    #[test]
    fn zero_step_is_cyclic_projection() {
        let mut a = linear_term(1.0);
        a.operator = FixedPointOperator::halfspace(v(&[1.0]), 3.0).unwrap();
        let p = SumOfRatiosProgram::new(vec![a, linear_term(2.0)]).unwrap();
        let s1 = SolverState::for_sum(&p, v(&[11.0])).unwrap();
        let s2 = ifssm_step(&p, &s1, 0.0).unwrap();
        assert_eq!(s2.x, p.joint_operator.apply(&v(&[11.0])));
        assert_eq!(s2.x, v(&[3.0]));
    }

    #[test]
    fn zero_iterations() {
        let p = SumOfRatiosProgram::new(vec![linear_term(1.0)]).unwrap();
        let sched = StepSchedule::harmonic(1.0).unwrap();
        let (state, trace) = ifssm_run(&p, v(&[5.0]), &sched, &StopRule::max_iters(0)).unwrap();
        assert!(trace.is_empty());
        assert_eq!(state.x, v(&[5.0]));
    }
}
