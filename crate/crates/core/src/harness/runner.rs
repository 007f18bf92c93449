//! Runs configured methods over generated trials and aggregates the results.

use std::time::Instant;

use super::config::{Algorithm, ExperimentConfig, MethodConfig};
use crate::baselines::{dinkelbach_run_with, HsdmSubproblem};
use crate::functions::Subdifferentiable;
use crate::par::{self, Execution};
use crate::problems::{Family, Instance};
use crate::program::SumOfRatiosProgram;
use crate::solvers::{
    afssm_run_with, fssm_run_with, ifssm_run_with, RunOptions, RunTrace, SolverState, StopRule,
};
use crate::{Error, Result, Vector};

/// Points on the elapsed-time grid used for wall-clock curves.
pub const TIME_GRID_POINTS: usize = 100;

/// Outcome of one method on one instance.
#[derive(Debug, Clone)]
pub struct MethodRun {
    pub trace: RunTrace,
    pub final_x: Vector,
    pub final_obj: f64,
    pub final_feas: f64,
    /// Final numerator and denominator values (cost and profit) for the
    /// Cobb–Douglas family.
    pub cost_profit: Option<(f64, f64)>,
    pub iterations: usize,
    pub time_s: f64,
}

/// Runs one method on one instance from `x1`.
pub fn run_method(
    instance: &Instance,
    method: &MethodConfig,
    stop: &StopRule,
    x1: Vector,
    options: &RunOptions,
) -> Result<MethodRun> {
    let variant = method.variant()?;
    let started = Instant::now();
    let schedule = method.schedule()?;
    let need_schedule = || {
        schedule
            .ok_or_else(|| Error::Config(format!("method '{}' needs an eta schedule", method.name)))
    };
    let (state, mut trace, cost_profit): (SolverState, RunTrace, Option<(f64, f64)>) =
        match method.algorithm {
            Algorithm::Ifssm => {
                let mut p = instance.sum(variant)?;
                if let Some(r) = method.ball {
                    p = with_ball_sum(&p, &x1, r)?;
                }
                let (s, t) = ifssm_run_with(&p, x1, &need_schedule()?, stop, options)?;
                (s, t, None)
            }
            algorithm => {
                let mut p = instance.single(variant)?;
                if let Some(r) = method.ball {
                    p.operator = p.operator.clone().with_enclosing_ball(x1.clone(), r)?;
                }
                let (s, t) = match algorithm {
                    Algorithm::Fssm => fssm_run_with(&p, x1, &need_schedule()?, stop, options)?,
                    Algorithm::Afssm => afssm_run_with(&p, x1, &need_schedule()?, stop, options)?,
                    _ => {
                        let inner = method.inner_loop();
                        inner.validate()?;
                        dinkelbach_run_with(&p, x1, &HsdmSubproblem(inner), stop, options)?
                    }
                };
                let cp = if instance.family() == Family::CobbDouglas {
                    Some((p.numerator.value(&s.x)?, p.denominator.value(&s.x)?))
                } else {
                    None
                };
                (s, t, cp)
            }
        };
    trace.config.method = method.name.clone();
    Ok(MethodRun {
        iterations: trace.rows.len(),
        final_obj: state.theta,
        final_feas: trace.final_feas,
        final_x: state.x,
        time_s: started.elapsed().as_secs_f64(),
        cost_profit,
        trace,
    })
}

fn with_ball_sum(
    p: &SumOfRatiosProgram,
    center: &Vector,
    radius: f64,
) -> Result<SumOfRatiosProgram> {
    let mut components = p.components.clone();
    if let Some(last) = components.last_mut() {
        last.operator = last
            .operator
            .clone()
            .with_enclosing_ball(center.clone(), radius)?;
    }
    let mut q = SumOfRatiosProgram::new(components)?;
    q.denom_bounds = p.denom_bounds;
    q.feasibility = p.feasibility.clone();
    Ok(q)
}

/// All methods on one trial.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    /// One entry per configured method, in config order; errors are kept as
    /// their message.
    pub runs: Vec<std::result::Result<MethodRun, String>>,
}

/// One aggregated curve point. `x` is the iteration index, or elapsed
/// seconds for wall-clock runs.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub x: f64,
    pub theta: f64,
    pub residual: f64,
    pub rel_obj: f64,
    pub rel_iter: f64,
    pub feas: f64,
    /// Trials contributing to this point.
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: String,
    pub trials_ok: usize,
    pub trials_failed: usize,
    pub mean_iters: f64,
    pub mean_time_s: f64,
    pub mean_final_obj: f64,
    pub mean_final_feas: f64,
    pub mean_cost: Option<f64>,
    pub mean_profit: Option<f64>,
    pub time_axis: bool,
    pub curve: Vec<CurvePoint>,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub family: Family,
    pub trials: Vec<TrialRecord>,
    pub summaries: Vec<MethodSummary>,
}

/// Generates each trial (seed = base + index), runs every method on it and
/// aggregates. Trials run on `cfg.workers` threads; aggregation is a
/// sequential reduce in trial order, so the numbers do not depend on the
/// worker count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let stop = cfg.stop_rule()?;
    let family = cfg.family()?;
    let options = RunOptions {
        record_iterates: Some(false),
    };
    let exec = Execution::from_workers(cfg.workers);
    let trials: Vec<usize> = (0..cfg.trials).collect();
    let records = par::map(exec, trials, |t| run_trial(cfg, t, &stop, &options));
    let trials = records.into_iter().collect::<Result<Vec<_>>>()?;
    let budget = stop.wall_clock.map(|d| d.as_secs_f64());
    let summaries = cfg
        .methods
        .iter()
        .enumerate()
        .map(|(i, m)| summarize(&m.name, trials.iter().map(|t| &t.runs[i]), budget))
        .collect();
    Ok(ExperimentResult {
        config: cfg.clone(),
        family,
        trials,
        summaries,
    })
}

fn run_trial(
    cfg: &ExperimentConfig,
    trial: usize,
    stop: &StopRule,
    options: &RunOptions,
) -> Result<TrialRecord> {
    let spec = cfg.spec(trial)?;
    let instance = spec.generate()?;
    let x1 = match cfg.start {
        Some(v) => Vector::from_element(instance.dim(), v),
        None => instance.default_start(),
    };
    let runs = cfg
        .methods
        .iter()
        .map(|m| {
            run_method(&instance, m, stop, x1.clone(), options).map_err(|e| {
                log::warn!("trial {trial} method {}: {e}", m.name);
                e.to_string()
            })
        })
        .collect();
    Ok(TrialRecord {
        trial,
        seed: spec.seed,
        runs,
    })
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        f64::NAN
    } else {
        sum / count as f64
    }
}

/// Mean of per-trial finals over the successful trials, plus the curve.
pub fn summarize<'a>(
    method: &str,
    runs: impl Iterator<Item = &'a std::result::Result<MethodRun, String>>,
    wall_clock_budget: Option<f64>,
) -> MethodSummary {
    let runs: Vec<_> = runs.collect();
    let ok: Vec<&MethodRun> = runs.iter().filter_map(|r| r.as_ref().ok()).collect();
    let cost: Vec<(f64, f64)> = ok.iter().filter_map(|r| r.cost_profit).collect();
    let traces: Vec<&RunTrace> = ok.iter().map(|r| &r.trace).collect();
    let curve = match wall_clock_budget {
        Some(budget) => time_curve(&traces, budget),
        None => iteration_curve(&traces),
    };
    MethodSummary {
        method: method.to_string(),
        trials_ok: ok.len(),
        trials_failed: runs.len() - ok.len(),
        mean_iters: mean(ok.iter().map(|r| r.iterations as f64)),
        mean_time_s: mean(ok.iter().map(|r| r.time_s)),
        mean_final_obj: mean(ok.iter().map(|r| r.final_obj)),
        mean_final_feas: mean(ok.iter().map(|r| r.final_feas)),
        mean_cost: (!cost.is_empty()).then(|| mean(cost.iter().map(|c| c.0))),
        mean_profit: (!cost.is_empty()).then(|| mean(cost.iter().map(|c| c.1))),
        time_axis: wall_clock_budget.is_some(),
        curve,
    }
}

/// Mean per iteration index over the trials that reached it.
pub fn iteration_curve(traces: &[&RunTrace]) -> Vec<CurvePoint> {
    let longest = traces.iter().map(|t| t.rows.len()).max().unwrap_or(0);
    (0..longest)
        .map(|i| {
            let rows: Vec<_> = traces.iter().filter_map(|t| t.rows.get(i)).collect();
            CurvePoint {
                x: rows[0].n as f64,
                theta: mean(rows.iter().map(|r| r.theta)),
                residual: mean(rows.iter().map(|r| r.residual)),
                rel_obj: mean(rows.iter().map(|r| r.rel_obj)),
                rel_iter: mean(rows.iter().map(|r| r.rel_iter)),
                feas: mean(rows.iter().map(|r| r.feas)),
                count: rows.len(),
            }
        })
        .collect()
}

/// Resamples each trace onto `t_j = budget·j/100`, `j = 1..=100`, taking the
/// last row recorded at or before `t_j` (the first row if none), then
/// averages across trials.
pub fn time_curve(traces: &[&RunTrace], budget: f64) -> Vec<CurvePoint> {
    let traces: Vec<_> = traces.iter().filter(|t| !t.rows.is_empty()).collect();
    if traces.is_empty() {
        return Vec::new();
    }
    (1..=TIME_GRID_POINTS)
        .map(|j| {
            let t = budget * j as f64 / TIME_GRID_POINTS as f64;
            let rows: Vec<_> = traces
                .iter()
                .map(|tr| {
                    let idx = tr.rows.partition_point(|r| r.elapsed_s <= t);
                    &tr.rows[idx.saturating_sub(1)]
                })
                .collect();
            CurvePoint {
                x: t,
                theta: mean(rows.iter().map(|r| r.theta)),
                residual: mean(rows.iter().map(|r| r.residual)),
                rel_obj: mean(rows.iter().map(|r| r.rel_obj)),
                rel_iter: mean(rows.iter().map(|r| r.rel_iter)),
                feas: mean(rows.iter().map(|r| r.feas)),
                count: rows.len(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::TraceRow;

    fn row(n: usize, v: f64, t: f64) -> TraceRow {
        TraceRow {
            n,
            theta: v,
            residual: v,
            rel_obj: v,
            rel_iter: v,
            feas: v,
            eta: 0.0,
            elapsed_s: t,
            direction_norm_sq: 0.0,
            inner_displacement_sq: 0.0,
            iterate: None,
        }
    }

    fn trace(rows: Vec<TraceRow>) -> RunTrace {
        RunTrace {
            rows,
            ..RunTrace::default()
        }
    }

    #[test]
    fn iteration_curve_handles_ragged_traces() {
        let a = trace(vec![row(1, 1.0, 0.0), row(2, 3.0, 0.0)]);
        let b = trace(vec![row(1, 3.0, 0.0)]);
        let c = iteration_curve(&[&a, &b]);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].theta, 2.0);
        assert_eq!(c[0].count, 2);
        assert_eq!(c[1].theta, 3.0);
        assert_eq!(c[1].count, 1);
    }

    #[test]
    fn time_curve_steps() {
        let a = trace(vec![row(1, 10.0, 0.1), row(2, 5.0, 0.5), row(3, 1.0, 0.95)]);
        let c = time_curve(&[&a], 1.0);
        assert_eq!(c.len(), TIME_GRID_POINTS);
        assert_eq!(c[0].theta, 10.0);
        assert_eq!(c[49].theta, 5.0);
        assert_eq!(c[94].theta, 1.0);
        assert_eq!(c[99].theta, 1.0);
    }

    #[test]
    fn failed_trials_are_counted_and_excluded() {
        let ok = MethodRun {
            trace: trace(vec![row(1, 2.0, 0.0)]),
            final_x: Vector::zeros(1),
            final_obj: 2.0,
            final_feas: 0.0,
            cost_profit: None,
            iterations: 1,
            time_s: 0.0,
        };
        let runs = vec![
            Ok(ok.clone()),
            Err("boom".to_string()),
            Ok(MethodRun {
                final_obj: 4.0,
                ..ok
            }),
        ];
        let s = summarize("m", runs.iter(), None);
        assert_eq!(s.trials_ok + s.trials_failed, 3);
        assert_eq!(s.trials_failed, 1);
        assert_eq!(s.mean_final_obj, 3.0);
    }
}
