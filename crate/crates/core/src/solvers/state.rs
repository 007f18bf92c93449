use std::time::Instant;

use super::{StepSchedule, StopRule, TerminationStatus};
use crate::harness::metrics::{metric_rel_iter, metric_rel_obj};
use crate::{Result, Vector};

/// Iterate vectors are kept in traces up to this dimension unless asked.
pub const AUTO_RECORD_MAX_DIM: usize = 100;

/// What the last transition computed, kept for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct StepInfo {
    pub eta: f64,
    /// The point handed to the operator: `yⁿ` (FSSM), `uⁿ` (AFSSM) or the
    /// last inner point `v^{m−1,n}` (IFSSM).
    pub pre_image: Vector,
    /// `‖f′(xⁿ) + θₙh′(xⁿ)‖²`; the largest over components for IFSSM.
    pub direction_norm_sq: f64,
    /// `Σᵢ ‖x^{i,n} − x^{i−1,n}‖²` over the inner sweep (IFSSM only).
    pub inner_displacement_sq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    /// 1-based iteration counter of the current iterate.
    pub n: usize,
    pub x: Vector,
    /// `θₙ` for single ratios, `F(xⁿ)` for sums of ratios.
    pub theta: f64,
    /// Per-component `θ_{i,n}` for sums of ratios, empty otherwise.
    pub component_thetas: Vec<f64>,
    /// `min θ₁..θₙ`.
    pub best_theta: f64,
    pub last_step: Option<StepInfo>,
}

impl SolverState {
    pub fn new(x: Vector, theta: f64) -> Self {
        Self {
            n: 1,
            x,
            theta,
            component_thetas: Vec::new(),
            best_theta: theta,
            last_step: None,
        }
    }

    pub(crate) fn advance(&self, x: Vector, theta: f64, info: StepInfo) -> Self {
        Self {
            n: self.n + 1,
            x,
            theta,
            component_thetas: Vec::new(),
            best_theta: self.best_theta.min(theta),
            last_step: Some(info),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub n: usize,
    /// Objective at `xⁿ`.
    pub theta: f64,
    /// Operator residual at `xⁿ`.
    pub residual: f64,
    /// Relative change of the objective from `xⁿ` to `xⁿ⁺¹`; NaN when
    /// `θₙ ≤ −1` puts the formula out of its domain.
    pub rel_obj: f64,
    pub rel_iter: f64,
    /// Problem-specific feasibility measure at `xⁿ`.
    pub feas: f64,
    pub eta: f64,
    pub elapsed_s: f64,
    pub direction_norm_sq: f64,
    pub inner_displacement_sq: f64,
    pub iterate: Option<Vec<f64>>,
}

/// Configuration echo stored with every trace.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TraceConfig {
    pub method: String,
    pub schedule: Option<StepSchedule>,
    pub dim: usize,
    pub initial_point: Vec<f64>,
    pub seed: Option<u64>,
    pub extra: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunTrace {
    pub config: TraceConfig,
    pub rows: Vec<TraceRow>,
    pub status: Option<TerminationStatus>,
    pub final_residual: f64,
    pub final_feas: f64,
}

impl RunTrace {
    pub fn new(config: TraceConfig) -> Self {
        Self {
            config,
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Largest `‖f′ + θh′‖²` over the first `k` rows.
    pub fn direction_bound(&self, k: usize) -> f64 {
        self.rows
            .iter()
            .take(k)
            .map(|r| r.direction_norm_sq)
            .fold(0.0, f64::max)
    }

    /// `min θ` over the first `k` rows.
    pub fn best_theta(&self, k: usize) -> Option<f64> {
        self.rows.iter().take(k).map(|r| r.theta).reduce(f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOptions {
    /// `None` records iterates only when the dimension is at most
    /// [`AUTO_RECORD_MAX_DIM`].
    pub record_iterates: Option<bool>,
}

impl RunOptions {
    fn records(&self, dim: usize) -> bool {
        self.record_iterates.unwrap_or(dim <= AUTO_RECORD_MAX_DIM)
    }
}

/// Shared run loop: steps until the stop rule fires and records one row per
/// transition. `measure` returns `(residual, feasibility)` at a point.
pub(crate) fn drive<M, S>(
    initial: SolverState,
    schedule: impl Fn(usize) -> f64,
    stop: &StopRule,
    options: &RunOptions,
    mut config: TraceConfig,
    measure: M,
    mut step: S,
) -> Result<(SolverState, RunTrace)>
where
    M: Fn(&Vector) -> (f64, f64),
    S: FnMut(&SolverState, f64) -> Result<SolverState>,
{
    stop.validate()?;
    let start = Instant::now();
    config.dim = initial.x.len();
    config.initial_point = initial.x.iter().cloned().collect();
    let record = options.records(initial.x.len());
    let mut trace = RunTrace::new(config);
    let mut state = initial;
    let (mut residual, mut feas) = measure(&state.x);
    let mut steps = 0usize;
    let status = loop {
        if let Some(status) = stop.before_step(steps, start.elapsed()) {
            break status;
        }
        let eta = schedule(state.n);
        let next = step(&state, eta)?;
        let rel_obj = metric_rel_obj(state.theta, next.theta).unwrap_or(f64::NAN);
        let rel_iter = metric_rel_iter(&state.x, &next.x);
        let (next_residual, next_feas) = measure(&next.x);
        let info = next.last_step.as_ref();
        trace.rows.push(TraceRow {
            n: state.n,
            theta: state.theta,
            residual,
            rel_obj,
            rel_iter,
            feas,
            eta: info.map_or(eta, |i| i.eta),
            elapsed_s: start.elapsed().as_secs_f64(),
            direction_norm_sq: info.map_or(0.0, |i| i.direction_norm_sq),
            inner_displacement_sq: info.map_or(0.0, |i| i.inner_displacement_sq),
            iterate: record.then(|| state.x.iter().cloned().collect()),
        });
        state = next;
        residual = next_residual;
        feas = next_feas;
        steps += 1;
        let rel_obj_for_stop = if rel_obj.is_nan() {
            f64::INFINITY
        } else {
            rel_obj
        };
        if let Some(status) = stop.after_step(rel_iter, rel_obj_for_stop, residual) {
            break status;
        }
    };
    trace.status = Some(status);
    trace.final_residual = residual;
    trace.final_feas = feas;
    Ok((state, trace))
}
