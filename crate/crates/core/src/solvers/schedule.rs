use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Step-size rule `n ↦ ηₙ`, with `n` starting at 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSchedule {
    /// `ηₙ = η₀`.
    Constant(f64),
    /// `ηₙ = c / (n+1)^p`.
    Power { scale: f64, exponent: f64 },
    /// `ηₙ = c / (n+1)`.
    Harmonic(f64),
}

impl StepSchedule {
    pub fn constant(eta: f64) -> Result<Self> {
        Self::Constant(eta).validated()
    }

    pub fn power(scale: f64, exponent: f64) -> Result<Self> {
        Self::Power { scale, exponent }.validated()
    }

    pub fn harmonic(scale: f64) -> Result<Self> {
        Self::Harmonic(scale).validated()
    }

    pub fn validated(self) -> Result<Self> {
        let ok = match self {
            StepSchedule::Constant(c) | StepSchedule::Harmonic(c) => c > 0.0 && c.is_finite(),
            StepSchedule::Power { scale, exponent } => {
                scale > 0.0 && scale.is_finite() && exponent > 0.0 && exponent.is_finite()
            }
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::InvalidSpec(format!(
                "step schedule {self} must be positive"
            )))
        }
    }

    /// `ηₙ`. `n` is 1-based; `n = 0` is treated as 1.
    pub fn step(&self, n: usize) -> f64 {
        let n1 = n.max(1) as f64 + 1.0;
        match *self {
            StepSchedule::Constant(c) => c,
            StepSchedule::Power { scale, exponent } => scale / n1.powf(exponent),
            StepSchedule::Harmonic(c) => c / n1,
        }
    }

    /// True when `Σηₙ = ∞` and `Σηₙ² < ∞`.
    pub fn is_square_summable_divergent(&self) -> bool {
        match *self {
            StepSchedule::Constant(_) => false,
            StepSchedule::Harmonic(_) => true,
            StepSchedule::Power { exponent, .. } => exponent > 0.5 && exponent <= 1.0,
        }
    }

    pub fn constant_value(&self) -> Option<f64> {
        match *self {
            StepSchedule::Constant(c) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for StepSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepSchedule::Constant(c) => write!(f, "const:{c:?}"),
            StepSchedule::Power { scale, exponent } => write!(f, "power:{scale:?},{exponent:?}"),
            StepSchedule::Harmonic(c) => write!(f, "harmonic:{c:?}"),
        }
    }
}

impl FromStr for StepSchedule {
    type Err = Error;

    /// `const:η`, `harmonic:c` or `power:c,p`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse step schedule '{s}'"));
        let (kind, args) = s.trim().split_once(':').ok_or_else(bad)?;
        let nums: Vec<f64> = args
            .split(',')
            .map(|a| a.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        let schedule = match (kind.trim(), nums.as_slice()) {
            ("const" | "constant", [c]) => StepSchedule::Constant(*c),
            ("harmonic", [c]) => StepSchedule::Harmonic(*c),
            ("power", [c, p]) => StepSchedule::Power {
                scale: *c,
                exponent: *p,
            },
            _ => return Err(bad()),
        };
        schedule.validated()
    }
}
