//! Experiment configuration: a TOML file plus command-line overrides.
//!
//! ```toml
//! family = "quadratic_linear"
//! k = 100
//! m = 10
//! seed = 0
//! trials = 5
//! stop = "time:2"
//! out = "results"
//!
//! [[method]]
//! name = "fssm-c"
//! algorithm = "fssm"
//! eta = "const:5.1e-5"
//!
//! [[method]]
//! name = "dinkelbach"
//! algorithm = "dinkelbach"
//! inner_iters = 10
//! alpha = 3e-6
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::baselines::{AlphaRule, InnerLoopConfig, DEFAULT_INNER_ITERS};
use crate::problems::{Family, GeneratorSpec, OperatorVariant};
use crate::solvers::{StepSchedule, StopRule};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Fssm,
    Afssm,
    Ifssm,
    Dinkelbach,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fssm" => Ok(Self::Fssm),
            "afssm" => Ok(Self::Afssm),
            "ifssm" => Ok(Self::Ifssm),
            "dinkelbach" => Ok(Self::Dinkelbach),
            _ => Err(Error::Config(format!("unknown algorithm '{s}'"))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Fssm => "fssm",
            Self::Afssm => "afssm",
            Self::Ifssm => "ifssm",
            Self::Dinkelbach => "dinkelbach",
        })
    }
}

/// One `[[method]]` table.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodConfig {
    pub name: String,
    pub algorithm: Algorithm,
    /// Step schedule, e.g. `const:0.1`, `harmonic:0.1`, `power:1,0.75`.
    #[serde(default)]
    pub eta: Option<String>,
    /// `cyclic` or `simultaneous`; only the Cobb–Douglas family offers both.
    #[serde(default)]
    pub operator: Option<String>,
    /// Dinkelbach inner HSDM iterations.
    #[serde(default)]
    pub inner_iters: Option<usize>,
    /// Dinkelbach inner step constant `c` in `α = c/(1 + θ)`.
    #[serde(default)]
    pub alpha: Option<f64>,
    /// Radius of an enclosing ball around the start point intersected with
    /// the feasible set.
    #[serde(default)]
    pub ball: Option<f64>,
}

impl MethodConfig {
    pub fn new(name: impl Into<String>, algorithm: Algorithm) -> Self {
        Self {
            name: name.into(),
            algorithm,
            eta: None,
            operator: None,
            inner_iters: None,
            alpha: None,
            ball: None,
        }
    }

    pub fn with_eta(mut self, eta: impl Into<String>) -> Self {
        self.eta = Some(eta.into());
        self
    }

    pub fn schedule(&self) -> Result<Option<StepSchedule>> {
        self.eta.as_deref().map(str::parse).transpose()
    }

    pub fn variant(&self) -> Result<OperatorVariant> {
        self.operator
            .as_deref()
            .map_or(Ok(OperatorVariant::default()), str::parse)
    }

    pub fn inner_loop(&self) -> InnerLoopConfig {
        let default = InnerLoopConfig::default();
        InnerLoopConfig {
            inner_iters: self.inner_iters.unwrap_or(DEFAULT_INNER_ITERS),
            alpha_rule: self
                .alpha
                .map_or(default.alpha_rule, AlphaRule::ThetaScaled),
        }
    }
}

fn default_trials() -> usize {
    1
}

fn default_workers() -> usize {
    1
}

fn default_out() -> PathBuf {
    PathBuf::from("results")
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: String,
    #[serde(default)]
    pub k: usize,
    #[serde(default)]
    pub m: usize,
    #[serde(default)]
    pub p: usize,
    /// Trial `t` uses seed `seed + t`.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Stop rule, e.g. `iters:1000|rel:1e-5`.
    pub stop: String,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Overrides the family's default start with a constant vector.
    #[serde(default)]
    pub start: Option<f64>,
    #[serde(default, rename = "method")]
    pub methods: Vec<MethodConfig>,
}

/// Flag overrides applied on top of a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub family: Option<String>,
    pub k: Option<usize>,
    pub m: Option<usize>,
    pub p: Option<usize>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    /// Keeps only the named method; an algorithm name not present in the
    /// config adds a method of that algorithm.
    pub method: Option<String>,
    /// Replaces every method's schedule.
    pub eta: Option<String>,
    pub stop: Option<String>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Builds a config from flags alone; `family`, `stop` and `method` must
    /// be given.
    pub fn from_overrides(o: &Overrides) -> Result<Self> {
        let missing = |what: &str| Error::Config(format!("--{what} is required without --config"));
        let mut cfg = Self {
            family: o.family.clone().ok_or_else(|| missing("family"))?,
            k: 0,
            m: 0,
            p: 0,
            seed: 0,
            trials: 1,
            stop: o.stop.clone().ok_or_else(|| missing("stop"))?,
            out: default_out(),
            workers: 1,
            start: None,
            methods: Vec::new(),
        };
        if o.method.is_none() {
            return Err(missing("method"));
        }
        cfg.apply(o)?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(v) = &o.family {
            self.family = v.clone();
        }
        if let Some(v) = o.k {
            self.k = v;
        }
        if let Some(v) = o.m {
            self.m = v;
        }
        if let Some(v) = o.p {
            self.p = v;
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.trials {
            self.trials = v;
        }
        if let Some(v) = &o.stop {
            self.stop = v.clone();
        }
        if let Some(v) = &o.out {
            self.out = v.clone();
        }
        if let Some(v) = o.workers {
            self.workers = v;
        }
        if let Some(name) = &o.method {
            if self.methods.iter().any(|m| &m.name == name) {
                self.methods.retain(|m| &m.name == name);
            } else {
                let algorithm: Algorithm = name.parse()?;
                self.methods = vec![MethodConfig::new(name.clone(), algorithm)];
            }
        }
        if let Some(eta) = &o.eta {
            for m in &mut self.methods {
                m.eta = Some(eta.clone());
            }
        }
        Ok(())
    }

    pub fn family(&self) -> Result<Family> {
        self.family.parse()
    }

    pub fn stop_rule(&self) -> Result<StopRule> {
        let rule: StopRule = self.stop.parse()?;
        rule.validate()?;
        Ok(rule)
    }

    pub fn spec(&self, trial: usize) -> Result<GeneratorSpec> {
        Ok(GeneratorSpec::new(
            self.family()?,
            self.k,
            self.m,
            self.p,
            self.seed.wrapping_add(trial as u64),
        ))
    }

    /// Checks everything that can be checked without running a solver.
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Config("at least one method is required".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        let family = self.family()?;
        self.spec(0)?.validate()?;
        self.stop_rule()?;
        let mut names = std::collections::HashSet::new();
        for m in &self.methods {
            if !names.insert(m.name.as_str()) {
                return Err(Error::Config(format!("duplicate method name '{}'", m.name)));
            }
            if m.name.is_empty() || m.name.contains(['/', '\\', ',']) {
                return Err(Error::Config(format!(
                    "method name '{}' is not file-safe",
                    m.name
                )));
            }
            let schedule = m.schedule()?;
            match m.algorithm {
                Algorithm::Dinkelbach => m.inner_loop().validate()?,
                _ if schedule.is_none() => {
                    return Err(Error::Config(format!(
                        "method '{}' needs an eta schedule",
                        m.name
                    )))
                }
                _ => {}
            }
            let variant = m.variant()?;
            if variant == OperatorVariant::Simultaneous && family != Family::CobbDouglas {
                return Err(Error::Config(format!(
                    "method '{}': the simultaneous operator exists only for cobb_douglas",
                    m.name
                )));
            }
            if family == Family::SumLinearRatios && m.algorithm != Algorithm::Ifssm {
                return Err(Error::Config(format!(
                    "method '{}': sum_linear_ratios is a sum of ratios and needs ifssm",
                    m.name
                )));
            }
            if let Some(r) = m.ball {
                if !(r > 0.0) {
                    return Err(Error::Config(format!(
                        "method '{}': ball radius must be positive",
                        m.name
                    )));
                }
            }
        }
        Ok(())
    }
}
