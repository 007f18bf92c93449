//! Fixed-point subgradient splitting methods for fractional programs.
//!
//! The crate solves problems of the form
//!
//! ```text
//! minimize f(x) / g(x)   subject to   x ∈ Fix T
//! ```
//!
//! where `f` is convex and nonnegative, `g` is concave and positive, and the
//! feasible set is the fixed-point set of a strongly quasi-nonexpansive
//! operator `T` (typically a composition or average of metric projections).
//! The sum-of-ratios variant `Σ fᵢ/gᵢ` over `∩ Fix Tᵢ` is handled by an
//! incremental sweep.
//!
//! Layout:
//!
//! * [`operators`] builds `T` from closed-form projections.
//! * [`functions`] holds value/subgradient oracles, [`program`] bundles them.
//! * [`solvers`] has FSSM, AFSSM and IFSSM plus the descent diagnostics.
//! * [`baselines`] has Dinkelbach's method, HSDM and Halpern iteration.
//! * [`problems`] generates the benchmark families and analytic instances.
//! * [`harness`] computes metrics, runs experiments and writes CSV.

pub mod baselines;
pub mod error;
pub mod functions;
pub mod harness;
pub mod operators;
pub mod par;
pub mod problems;
pub mod program;
pub mod solvers;

pub use error::{Error, Result};
pub use functions::{ConvexityClass, Denominator, Subdifferentiable, SubdifferentiableFunction};
pub use operators::FixedPointOperator;
pub use program::{FractionalProgram, RatioComponent, SumOfRatiosProgram};
pub use solvers::{RunTrace, SolverState, StepSchedule, StopRule};

/// Dense real vector used for iterates throughout the crate.
pub type Vector = nalgebra::DVector<f64>;
/// Dense real matrix.
pub type Matrix = nalgebra::DMatrix<f64>;
