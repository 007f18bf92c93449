//! Per-step and per-run certificates for the splitting methods.
//!
//! Each check returns a signed slack (right-hand side minus left-hand side);
//! a nonnegative slack certifies the inequality on the data checked.

use super::{RunTrace, SolverState, StepInfo};
use crate::functions::Subdifferentiable;
use crate::operators::FixedPointOperator;
use crate::program::{sum_ratio_value, FractionalProgram, SumOfRatiosProgram};
use crate::{Error, Result, Vector};

/// A reference point `z` counts as fixed when `‖Tz − z‖ ≤ FIXED_POINT_TOL·(1 + ‖z‖)`.
pub const FIXED_POINT_TOL: f64 = 1e-8;

fn check_fixed(op: &FixedPointOperator, z: &Vector) -> Result<()> {
    let residual = op.residual(z);
    let tol = FIXED_POINT_TOL * (1.0 + z.norm());
    if residual > tol {
        return Err(Error::InvalidReferencePoint { residual, tol });
    }
    Ok(())
}

fn last_step(after: &SolverState) -> Result<&StepInfo> {
    after
        .last_step
        .as_ref()
        .ok_or_else(|| Error::Misuse("state has no recorded transition".into()))
}

/// Slack of the one-step Fejér-type inequality
///
/// ```text
/// ‖xⁿ⁺¹ − z‖² ≤ ‖xⁿ − z‖² + 2g(z)ηₙ(f(z)/g(z) − θₙ) + Bηₙ² − ρ‖Tyⁿ − yⁿ‖²
/// ```
///
/// for the FSSM transition `before → after`. `ρ` must be a valid modulus for
/// `T` and `B ≥ ‖f′(xⁿ) + θₙh′(xⁿ)‖²`.
pub fn check_descent_lemma(
    p: &FractionalProgram,
    before: &SolverState,
    after: &SolverState,
    z: &Vector,
    rho: f64,
    b: f64,
) -> Result<f64> {
    check_fixed(&p.operator, z)?;
    let info = last_step(after)?;
    if after.n != before.n + 1 {
        return Err(Error::Misuse(format!(
            "states are not consecutive: n = {} then {}",
            before.n, after.n
        )));
    }
    let gz = p.positive_denominator(z)?;
    let theta_z = p.numerator.value(z)? / gz;
    let eta = info.eta;
    let y = &info.pre_image;
    let operator_gap = (p.operator.apply(y) - y).norm_squared();
    let lhs = (&after.x - z).norm_squared();
    let rhs =
        (&before.x - z).norm_squared() + 2.0 * gz * eta * (theta_z - before.theta) + b * eta * eta
            - rho * operator_gap;
    Ok(rhs - lhs)
}

/// Slack of the constant-step rate bound
///
/// ```text
/// min_{1≤n≤K} θₙ − f(z)/g(z) ≤ ‖x¹ − z‖²/(2g(z)η₀K) + η₀B/(2g(z))
/// ```
///
/// over the first `k` rows of `trace`. Pass `B = trace.direction_bound(k)`
/// for the tightest verifiable value.
pub fn check_rate_bound_constant(
    p: &FractionalProgram,
    trace: &RunTrace,
    z: &Vector,
    eta0: f64,
    b: f64,
    k: usize,
) -> Result<f64> {
    match trace.config.schedule.and_then(|s| s.constant_value()) {
        Some(eta) if eta == eta0 => {}
        other => {
            return Err(Error::Misuse(format!(
                "rate bound needs a constant schedule with step {eta0}, trace has {other:?}"
            )))
        }
    }
    if k == 0 || trace.rows.len() < k {
        return Err(Error::Misuse(format!(
            "trace has {} rows, need K = {k} >= 1",
            trace.rows.len()
        )));
    }
    check_fixed(&p.operator, z)?;
    let x1 = Vector::from_column_slice(&trace.config.initial_point);
    let gz = p.positive_denominator(z)?;
    let theta_z = p.numerator.value(z)? / gz;
    let best = trace.best_theta(k).unwrap_or(f64::INFINITY);
    let bound = (&x1 - z).norm_squared() / (2.0 * gz * eta0 * k as f64) + eta0 * b / (2.0 * gz);
    Ok(bound - (best - theta_z))
}

/// Constants of the incremental descent inequality: `L = Σ Lᵢ` bounds the
/// numerator subgradients, `E = Σ Eᵢ` the denominator ones, `H ≥ |θ_{i,n}|`,
/// and `0 < N ≤ gᵢ ≤ M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncrementalConstants {
    pub l: f64,
    pub e: f64,
    pub h: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Slack of the IFSSM per-sweep inequality
///
/// ```text
/// ‖xⁿ⁺¹ − z‖² ≤ ‖xⁿ − z‖² + 2g(z)ηₙ(F(z) − F(xⁿ))
///             + 4M(N + 1/N)(L² + E²H²)ηₙ² − ½ Σᵢ‖x^{i,n} − x^{i−1,n}‖²
/// ```
///
/// with `g = Σ gᵢ`. Only meaningful when the constants are certified for
/// the instance, including `m + N ≤ M`.
pub fn check_incremental_descent_lemma(
    p: &SumOfRatiosProgram,
    before: &SolverState,
    after: &SolverState,
    z: &Vector,
    constants: &IncrementalConstants,
) -> Result<f64> {
    for c in &p.components {
        check_fixed(&c.operator, z)?;
    }
    let info = last_step(after)?;
    let gz: f64 = p
        .components
        .iter()
        .map(|c| c.denominator.value(z))
        .sum::<Result<f64>>()?;
    let fz = sum_ratio_value(p, z)?;
    let eta = info.eta;
    let IncrementalConstants {
        l,
        e,
        h,
        lower,
        upper,
    } = *constants;
    let lhs = (&after.x - z).norm_squared();
    let rhs = (&before.x - z).norm_squared()
        + 2.0 * gz * eta * (fz - before.theta)
        + 4.0 * upper * (lower + 1.0 / lower) * (l * l + e * e * h * h) * eta * eta
        - 0.5 * info.inner_displacement_sq;
    Ok(rhs - lhs)
}
