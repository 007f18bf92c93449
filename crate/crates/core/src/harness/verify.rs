//! Diagnostic suites: operator inequalities, subgradient checks and the
//! FSSM descent and rate certificates on random and analytic instances.

use crate::functions::{Denominator, Subdifferentiable, SubdifferentiableFunction};
use crate::operators::FixedPointOperator;
use crate::problems::rng::CoefficientStream;
use crate::problems::{gen_analytic, AnalyticTag};
use crate::program::FractionalProgram;
use crate::solvers::{
    check_descent_lemma, check_rate_bound_constant, fssm_run_with, fssm_step, RunOptions,
    SolverState, StepSchedule, StopRule,
};
use crate::{Matrix, Result, Vector};

/// Result of one suite. `worst` is the smallest slack seen (or the largest
/// relative error for the gradient check, negated).
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: String,
    pub checks: usize,
    pub worst: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl SuiteReport {
    fn new(name: impl Into<String>, threshold: f64) -> Self {
        Self {
            name: name.into(),
            checks: 0,
            worst: f64::INFINITY,
            threshold,
            passed: true,
        }
    }

    fn record(&mut self, slack: f64) {
        self.checks += 1;
        if !(slack >= self.worst) {
            self.worst = slack;
        }
        if !(slack >= self.threshold) {
            self.passed = false;
        }
    }

    fn merge(&mut self, other: &SuiteReport) {
        self.checks += other.checks;
        if !(other.worst >= self.worst) {
            self.worst = other.worst;
        }
        self.passed &= other.passed;
    }
}

impl std::fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {}: {} checks, worst slack {:e} (threshold {:e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.checks,
            self.worst,
            self.threshold
        )
    }
}

/// Single projections of every kind, with random data in dimension `dim`.
pub fn sample_projections(
    seed: u64,
    dim: usize,
) -> Result<Vec<(&'static str, FixedPointOperator)>> {
    let mut s = CoefficientStream::new(seed, 100);
    let normal = s.vector(dim, -1.0, 1.0);
    let lo = s.vector(dim, -2.0, 0.0);
    let hi = &lo + s.vector(dim, 0.5, 3.0);
    let rows = dim.saturating_sub(1).max(1);
    Ok(vec![
        (
            "halfspace",
            FixedPointOperator::halfspace(normal.clone(), s.open(-1.0, 1.0))?,
        ),
        (
            "hyperplane",
            FixedPointOperator::hyperplane(normal, s.open(-1.0, 1.0))?,
        ),
        (
            "affine",
            FixedPointOperator::affine(s.matrix(rows, dim, -1.0, 1.0), s.vector(rows, -1.0, 1.0))?,
        ),
        ("box", FixedPointOperator::box_projection(lo, hi)?),
        (
            "ball",
            FixedPointOperator::ball(s.vector(dim, -1.0, 1.0), s.open(0.5, 2.0))?,
        ),
    ])
}

/// Composites of projections onto sets that all contain the returned point.
pub fn sample_composites(
    seed: u64,
    dim: usize,
) -> Result<(Vector, Vec<(&'static str, FixedPointOperator)>)> {
    let mut s = CoefficientStream::new(seed, 101);
    let z = s.vector(dim, -1.0, 1.0);
    let mut parts = Vec::new();
    for _ in 0..3 {
        let a = s.vector(dim, -1.0, 1.0);
        let slack = s.open(0.0, 1.0);
        parts.push(FixedPointOperator::halfspace(a.clone(), a.dot(&z) + slack)?);
    }
    let lo = z.map(|v| v - 1.0) - s.vector(dim, 0.0, 1.0);
    let hi = z.map(|v| v + 1.0) + s.vector(dim, 0.0, 1.0);
    parts.push(FixedPointOperator::box_projection(lo, hi)?);
    parts.push(FixedPointOperator::ball(
        &z + s.vector(dim, -0.3, 0.3),
        1.0,
    )?);
    let compose = FixedPointOperator::compose(parts.clone())?;
    let average = FixedPointOperator::uniform_average(parts.clone())?;
    let relaxed = FixedPointOperator::compose(vec![average.clone(), parts[3].clone()])?;
    Ok((
        z,
        vec![
            ("composition", compose),
            ("average", average),
            ("average-then-box", relaxed),
        ],
    ))
}

/// FNE, cutter and 1-SQNE inequalities for every projection kind, and
/// ρ-SQNE for composites against their known common fixed point. Slacks are
/// scaled by `1 + ‖x − y‖²`.
pub fn operator_suite(samples: usize, seed: u64, tol: f64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("operator properties", -tol);
    for dim in [1usize, 2, 5, 10] {
        let mut pts = CoefficientStream::new(seed.wrapping_add(dim as u64), 102);
        for (_, op) in sample_projections(seed ^ dim as u64, dim)? {
            for _ in 0..samples {
                let x = pts.vector(dim, -5.0, 5.0);
                let y = pts.vector(dim, -5.0, 5.0);
                let (tx, ty) = (op.apply(&x), op.apply(&y));
                let scale = 1.0 + (&x - &y).norm_squared();
                let fne = (&tx - &ty).dot(&(&x - &y)) - (&tx - &ty).norm_squared();
                report.record(fne / scale);
                let z = ty;
                let scale = 1.0 + (&x - &z).norm_squared();
                let cutter = -(&x - &tx).dot(&(&z - &tx));
                report.record(cutter / scale);
                let sqne = (&x - &z).norm_squared()
                    - (&tx - &x).norm_squared()
                    - (&tx - &z).norm_squared();
                report.record(sqne / scale);
            }
        }
        let (z, composites) = sample_composites(seed ^ (dim as u64 * 31), dim)?;
        for (_, op) in composites {
            let rho = op.sqne_modulus();
            for _ in 0..samples {
                let x = pts.vector(dim, -5.0, 5.0);
                let tx = op.apply(&x);
                let scale = 1.0 + (&x - &z).norm_squared();
                let qne = (&x - &z).norm_squared() - (&tx - &z).norm_squared();
                report.record(qne / scale);
                let sqne = qne - rho * (&tx - &x).norm_squared();
                report.record(sqne / scale);
            }
        }
    }
    Ok(report)
}

/// Every function kind, in dimension `dim`, on a domain where it is finite.
pub fn sample_functions(
    seed: u64,
    dim: usize,
) -> Result<Vec<(&'static str, SubdifferentiableFunction)>> {
    let mut s = CoefficientStream::new(seed, 110);
    let p = s.matrix(dim, dim, -1.0, 1.0);
    let raw = s.vector(dim, 0.1, 1.0);
    let exponents = &raw / (raw.sum() * 1.25);
    Ok(vec![
        (
            "linear",
            SubdifferentiableFunction::linear(s.vector(dim, -2.0, 2.0)),
        ),
        (
            "affine",
            SubdifferentiableFunction::affine(s.vector(dim, -2.0, 2.0), s.open(-1.0, 1.0)),
        ),
        (
            "quadratic",
            SubdifferentiableFunction::quadratic(
                p.tr_mul(&p),
                s.vector(dim, -1.0, 1.0),
                s.open(0.0, 1.0),
            )?,
        ),
        (
            "neg_cobb_douglas",
            SubdifferentiableFunction::neg_cobb_douglas(s.open(1.0, 10.0), exponents)?,
        ),
    ])
}

/// Subgradient inequality `f(y) ≥ f(x) + ⟨f′(x), y − x⟩` on `pairs` random
/// pairs (relative tolerance `sub_tol`) and central finite differences on
/// `points` random points (relative tolerance `fd_tol`). Points are drawn
/// from the positive orthant so every kind is finite and differentiable.
pub fn subgradient_suite(
    pairs: usize,
    points: usize,
    seed: u64,
    sub_tol: f64,
    fd_tol: f64,
) -> Result<(SuiteReport, SuiteReport)> {
    let mut sub = SuiteReport::new("subgradient inequality", -sub_tol);
    let mut fd = SuiteReport::new("finite-difference gradient", -fd_tol);
    for dim in [1usize, 3, 8] {
        let mut pts = CoefficientStream::new(seed.wrapping_add(dim as u64), 111);
        let mut functions = sample_functions(seed ^ dim as u64, dim)?;
        let denom = Denominator::cobb_douglas(2.0, Vector::from_element(dim, 0.5 / dim as f64))?;
        functions.push(("denominator", denom.negated().clone()));
        for (_, f) in &functions {
            for _ in 0..pairs {
                let x = pts.vector(dim, 0.05, 5.0);
                let y = pts.vector(dim, 0.05, 5.0);
                let fy = f.value(&y)?;
                let lin = f.value(&x)? + f.subgradient(&x)?.dot(&(&y - &x));
                sub.record((fy - lin) / (1.0 + fy.abs().max(lin.abs())));
            }
            for _ in 0..points {
                let x = pts.vector(dim, 0.5, 5.0);
                let g = f.subgradient(&x)?;
                let mut approx = Vector::zeros(dim);
                for i in 0..dim {
                    let h = 1e-6 * (1.0 + x[i].abs());
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[i] += h;
                    xm[i] -= h;
                    approx[i] = (f.value(&xp)? - f.value(&xm)?) / (2.0 * h);
                }
                fd.record(-(&approx - &g).norm() / (1.0 + g.norm()));
            }
        }
    }
    Ok((sub, fd))
}

/// Random instance `(½⟨x,Qx⟩ + c) / (⟨s,x⟩ + s₀)` with `Q = PᵀP + I` over a
/// box, so `T` is a single projection with `ρ = 1`.
pub fn random_box_instance(seed: u64, dim: usize) -> Result<FractionalProgram> {
    let mut s = CoefficientStream::new(seed, 120);
    let p = s.matrix(dim, dim, -1.0, 1.0);
    let q = p.tr_mul(&p) + Matrix::identity(dim, dim);
    let numerator =
        SubdifferentiableFunction::quadratic(q, s.vector(dim, -1.0, 1.0), s.open(5.0, 10.0))?
            .with_strong_convexity(1.0);
    let denominator = Denominator::affine(s.vector(dim, 0.0, 1.0), s.open(1.0, 2.0));
    let lo = s.vector(dim, -1.0, 0.0);
    let hi = s.vector(dim, 1.0, 2.0);
    FractionalProgram::new(
        numerator,
        denominator,
        FixedPointOperator::box_projection(lo, hi)?,
    )
}

fn box_center(p: &FractionalProgram) -> Vector {
    let mut probe = Vector::from_element(p.dim(), 0.5);
    for _ in 0..2 {
        probe = p.operator.apply(&probe);
    }
    probe
}

/// Descent-lemma slack on every step of `steps`-step FSSM runs over
/// `instances` random box instances, with `B` taken from each step and `z`
/// both a box point and the final iterate.
pub fn descent_suite(instances: usize, steps: usize, seed: u64, tol: f64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("descent lemma", -tol);
    let schedule = StepSchedule::harmonic(0.1)?;
    for i in 0..instances {
        let dim = 2 + (i * 7) % 19;
        let p = random_box_instance(seed.wrapping_add(i as u64), dim)?;
        let z = box_center(&p);
        let mut state = SolverState::for_program(&p, Vector::from_element(dim, 1.5))?;
        state.x = p.operator.apply(&state.x);
        state.theta = crate::program::ratio_value(&p, &state.x)?;
        for _ in 0..steps {
            let next = fssm_step(&p, &state, schedule.step(state.n))?;
            let b = next.last_step.as_ref().map_or(0.0, |s| s.direction_norm_sq);
            report.record(check_descent_lemma(&p, &state, &next, &z, 1.0, b)?);
            state = next;
        }
    }
    Ok(report)
}

/// Rate-bound slack for constant steps `etas` and horizon `k` on the
/// analytic instances and `random` random box instances, with the trace
/// maximum as `B` and the optimum (or a box point) as `z`.
pub fn rate_suite(etas: &[f64], k: usize, random: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("rate bound", 0.0);
    let mut cases: Vec<(FractionalProgram, Vector, Vector)> = AnalyticTag::ALL
        .into_iter()
        .map(|t| {
            let inst = gen_analytic(t);
            (inst.program, inst.start, inst.argmin)
        })
        .collect();
    for i in 0..random {
        let dim = 2 + (i * 5) % 15;
        let p = random_box_instance(seed.wrapping_add(1000 + i as u64), dim)?;
        let z = box_center(&p);
        cases.push((p, Vector::from_element(dim, 1.5), z));
    }
    let options = RunOptions {
        record_iterates: Some(false),
    };
    for (p, x1, z) in &cases {
        for &eta in etas {
            let schedule = StepSchedule::constant(eta)?;
            let (_, trace) =
                fssm_run_with(p, x1.clone(), &schedule, &StopRule::max_iters(k), &options)?;
            let b = trace.direction_bound(k);
            report.record(check_rate_bound_constant(p, &trace, z, eta, b, k)?);
        }
    }
    Ok(report)
}

/// The suites run by `fracsplit verify`, at the default sizes.
pub fn default_suites(seed: u64) -> Result<Vec<SuiteReport>> {
    let (sub, fd) = subgradient_suite(1000, 100, seed, 1e-9, 1e-5)?;
    let mut all = vec![operator_suite(1000, seed, 1e-10)?, sub, fd];
    all.push(descent_suite(10, 10_000, seed, 1e-9)?);
    all.push(rate_suite(&[1e-2, 1e-3], 1000, 5, seed)?);
    Ok(all)
}

/// Combines reports that share a name.
pub fn combine(name: &str, reports: &[SuiteReport]) -> SuiteReport {
    let mut out = SuiteReport::new(name, reports.first().map_or(0.0, |r| r.threshold));
    for r in reports {
        out.merge(r);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        assert!(operator_suite(50, 1, 1e-10).unwrap().passed);
        let (sub, fd) = subgradient_suite(50, 10, 1, 1e-9, 1e-5).unwrap();
        assert!(sub.passed, "{sub}");
        assert!(fd.passed, "{fd}");
        assert!(descent_suite(2, 200, 1, 1e-9).unwrap().passed);
        assert!(rate_suite(&[1e-2], 100, 1, 1).unwrap().passed);
    }

    #[test]
    fn report_tracks_worst() {
        let mut r = SuiteReport::new("x", -1.0);
        r.record(3.0);
        r.record(-0.5);
        assert_eq!(r.worst, -0.5);
        assert!(r.passed);
        r.record(f64::NAN);
        assert!(!r.passed);
    }
}
