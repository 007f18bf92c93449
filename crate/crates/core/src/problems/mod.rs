//! Benchmark instance generators.
//!
//! Three random families (quadratic over linear with an affine constraint,
//! cost over Cobb–Douglas profit with funding levels, sums of linear ratios)
//! and a few analytic instances whose optima are known. Generation is a pure
//! function of [`GeneratorSpec`].

mod analytic;
mod families;
mod instance_file;
pub mod rng;

pub use analytic::{
    gen_analytic, AnalyticInstance, AnalyticTag, RATIO_2D_GRID_ARGMIN, RATIO_2D_GRID_MIN,
};
pub use families::{
    CobbDouglas, OperatorVariant, QuadraticLinear, SumLinearRatios, SUM_RATIOS_BOX, WIDE_BOX,
};
pub use instance_file::{read_instance, write_instance, FORMAT_VERSION};

use crate::program::{FractionalProgram, SumOfRatiosProgram};
use crate::{Error, Result, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    QuadraticLinear,
    CobbDouglas,
    SumLinearRatios,
    Analytic(AnalyticTag),
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Self::QuadraticLinear => "quadratic_linear",
            Self::CobbDouglas => "cobb_douglas",
            Self::SumLinearRatios => "sum_linear_ratios",
            Self::Analytic(tag) => tag.name(),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadratic_linear" => Ok(Self::QuadraticLinear),
            "cobb_douglas" => Ok(Self::CobbDouglas),
            "sum_linear_ratios" => Ok(Self::SumLinearRatios),
            other => other
                .parse::<AnalyticTag>()
                .map(Self::Analytic)
                .map_err(|_| Error::InvalidSpec(format!("unknown family '{other}'"))),
        }
    }
}

/// Family, dimensions and seed. Unused dimensions are ignored: `m` is the
/// constraint count for `quadratic_linear` and the ratio count for
/// `sum_linear_ratios`; `p` is the funding-level count for `cobb_douglas`
/// and the halfspace count for `sum_linear_ratios`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub k: usize,
    pub m: usize,
    pub p: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(family: Family, k: usize, m: usize, p: usize, seed: u64) -> Self {
        Self {
            family,
            k,
            m,
            p,
            seed,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let need = |name: &str, v: usize| {
            if v == 0 {
                Err(Error::InvalidSpec(format!(
                    "{name} must be positive for {}",
                    self.family
                )))
            } else {
                Ok(())
            }
        };
        match self.family {
            Family::QuadraticLinear => {
                need("k", self.k)?;
                need("m", self.m)?;
                if self.m >= self.k {
                    return Err(Error::InvalidSpec(format!(
                        "quadratic_linear needs m < k, got m = {} and k = {}",
                        self.m, self.k
                    )));
                }
            }
            Family::CobbDouglas => {
                need("k", self.k)?;
                need("p", self.p)?;
            }
            Family::SumLinearRatios => {
                need("k", self.k)?;
                need("m", self.m)?;
                need("p", self.p)?;
            }
            Family::Analytic(_) => {}
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<Instance> {
        self.validate()?;
        Ok(match self.family {
            Family::QuadraticLinear => {
                Instance::QuadraticLinear(QuadraticLinear::generate(self.k, self.m, self.seed)?)
            }
            Family::CobbDouglas => {
                Instance::CobbDouglas(CobbDouglas::generate(self.k, self.p, self.seed)?)
            }
            Family::SumLinearRatios => Instance::SumLinearRatios(SumLinearRatios::generate(
                self.k, self.m, self.p, self.seed,
            )?),
            Family::Analytic(tag) => Instance::Analytic(tag),
        })
    }
}

pub fn gen_quadratic_linear(k: usize, m: usize, seed: u64) -> Result<FractionalProgram> {
    QuadraticLinear::generate(k, m, seed)?.program()
}

/// Returns the program with the cyclic operator; use
/// [`CobbDouglas::program`] to pick the variant.
pub fn gen_cobb_douglas(k: usize, p: usize, seed: u64) -> Result<FractionalProgram> {
    CobbDouglas::generate(k, p, seed)?.program(OperatorVariant::Cyclic)
}

pub fn gen_sum_linear_ratios(
    k: usize,
    m: usize,
    p: usize,
    seed: u64,
) -> Result<SumOfRatiosProgram> {
    SumLinearRatios::generate(k, m, p, seed)?.program()
}

/// A generated instance: raw coefficients, convertible to a program.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    QuadraticLinear(QuadraticLinear),
    CobbDouglas(CobbDouglas),
    SumLinearRatios(SumLinearRatios),
    Analytic(AnalyticTag),
}

impl Instance {
    pub fn family(&self) -> Family {
        match self {
            Self::QuadraticLinear(_) => Family::QuadraticLinear,
            Self::CobbDouglas(_) => Family::CobbDouglas,
            Self::SumLinearRatios(_) => Family::SumLinearRatios,
            Self::Analytic(tag) => Family::Analytic(*tag),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::QuadraticLinear(i) => i.k,
            Self::CobbDouglas(i) => i.k,
            Self::SumLinearRatios(i) => i.k,
            Self::Analytic(tag) => gen_analytic(*tag).program.dim(),
        }
    }

    /// Single-ratio program. Sums of ratios have none.
    pub fn single(&self, variant: OperatorVariant) -> Result<FractionalProgram> {
        match self {
            Self::QuadraticLinear(i) => i.program(),
            Self::CobbDouglas(i) => i.program(variant),
            Self::SumLinearRatios(_) => Err(Error::InvalidSpec(
                "sum_linear_ratios is a sum of ratios; use the incremental method".into(),
            )),
            Self::Analytic(tag) => Ok(gen_analytic(*tag).program),
        }
    }

    /// Sum-of-ratios program; single ratios become one component, except
    /// the 2-D analytic instance which uses its split form.
    pub fn sum(&self, variant: OperatorVariant) -> Result<SumOfRatiosProgram> {
        match self {
            Self::SumLinearRatios(i) => i.program(),
            Self::Analytic(tag) => Ok(gen_analytic(*tag).split_program()),
            other => Ok(SumOfRatiosProgram::from_single(&other.single(variant)?)),
        }
    }

    pub fn default_start(&self) -> Vector {
        match self {
            Self::QuadraticLinear(i) => i.default_start(),
            Self::CobbDouglas(i) => i.default_start(),
            Self::SumLinearRatios(i) => i.default_start(),
            Self::Analytic(tag) => gen_analytic(*tag).start,
        }
    }
}
