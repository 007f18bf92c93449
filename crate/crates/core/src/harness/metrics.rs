//! Relative-error and feasibility metrics reported by the experiments.

use crate::{Error, Matrix, Result, Vector};

/// Threshold of the relative-error stopping test.
pub const STOP_53_EPS: f64 = 1e-5;

/// `|θₙ₊₁ − θₙ| / (θₙ + 1)`.
pub fn metric_rel_obj(theta_prev: f64, theta_next: f64) -> Result<f64> {
    let denom = theta_prev + 1.0;
    if !(denom > 0.0) {
        return Err(Error::MetricDomain(format!(
            "relative objective error undefined for theta = {theta_prev}"
        )));
    }
    Ok((theta_next - theta_prev).abs() / denom)
}

/// `‖xⁿ⁺¹ − xⁿ‖ / (‖xⁿ‖ + 1)`.
pub fn metric_rel_iter(x_prev: &Vector, x_next: &Vector) -> f64 {
    (x_next - x_prev).norm() / (x_prev.norm() + 1.0)
}

/// `(‖Axⁿ⁺¹ − b‖ − ‖Axⁿ − b‖) / (‖Axⁿ − b‖ + 1)`; negative when feasibility
/// improves.
pub fn metric_rel_feas_linear(a: &Matrix, b: &Vector, x_prev: &Vector, x_next: &Vector) -> f64 {
    let prev = (a * x_prev - b).norm();
    let next = (a * x_next - b).norm();
    rel_feas_from_residuals(prev, next)
}

/// The linear-system relative feasibility change from precomputed residuals.
pub fn rel_feas_from_residuals(prev: f64, next: f64) -> f64 {
    (next - prev) / (prev + 1.0)
}

/// `(|FE(xⁿ⁺¹)| − |FE(xⁿ)|) / (FE(xⁿ⁺¹) + 1)`, the funding-level variant.
pub fn rel_fe_change(fe_prev: f64, fe_next: f64) -> f64 {
    (fe_next.abs() - fe_prev.abs()) / (fe_next + 1.0)
}

/// Funding-level feasibility error
/// `FE(x) = (1/2p)(Σ max{q̲ₗ − ⟨bₗ,x⟩, 0} + Σ max{⟨bₗ,x⟩ − q̄ₗ, 0})`,
/// with the `bₗ` as rows of `rows`.
pub fn metric_fe_halfspaces(rows: &Matrix, lower: &Vector, upper: &Vector, x: &Vector) -> f64 {
    let p = rows.nrows();
    if p == 0 {
        return 0.0;
    }
    let bx = rows * x;
    let total: f64 = (0..p)
        .map(|l| (lower[l] - bx[l]).max(0.0) + (bx[l] - upper[l]).max(0.0))
        .sum();
    total / (2.0 * p as f64)
}

/// `max(rel_iter, rel_obj) ≤ 10⁻⁵` with the objective `F`. False when
/// `F(xⁿ) ≤ −1`.
pub fn metric_stop_53(x_prev: &Vector, x_next: &Vector, f_prev: f64, f_next: f64) -> bool {
    match metric_rel_obj(f_prev, f_next) {
        Ok(rel_obj) => metric_rel_iter(x_prev, x_next).max(rel_obj) <= STOP_53_EPS,
        Err(_) => false,
    }
}
