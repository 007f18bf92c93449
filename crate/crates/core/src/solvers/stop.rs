use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use crate::{Error, Result};

/// Termination criteria, combined by OR.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StopRule {
    pub max_iters: Option<usize>,
    pub wall_clock: Option<Duration>,
    /// Stop once `max(rel_iter, rel_obj) ≤ ε`.
    pub rel_error: Option<f64>,
    /// Stop once `‖T(x) − x‖ ≤ tol`.
    pub residual: Option<f64>,
}

/// Why a run ended. Every variant is a normal termination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationStatus {
    MaxIters,
    WallClock,
    RelError,
    Residual,
}

impl fmt::Display for TerminationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TerminationStatus::MaxIters => "max_iters",
            TerminationStatus::WallClock => "wall_clock",
            TerminationStatus::RelError => "rel_error",
            TerminationStatus::Residual => "residual",
        };
        f.write_str(s)
    }
}

impl StopRule {
    pub fn max_iters(n: usize) -> Self {
        Self {
            max_iters: Some(n),
            ..Self::default()
        }
    }

    pub fn wall_clock(seconds: f64) -> Self {
        Self {
            wall_clock: Some(Duration::from_secs_f64(seconds)),
            ..Self::default()
        }
    }

    pub fn or_max_iters(mut self, n: usize) -> Self {
        self.max_iters = Some(n);
        self
    }

    pub fn or_wall_clock(mut self, seconds: f64) -> Self {
        self.wall_clock = Some(Duration::from_secs_f64(seconds));
        self
    }

    pub fn or_rel_error(mut self, eps: f64) -> Self {
        self.rel_error = Some(eps);
        self
    }

    pub fn or_residual(mut self, tol: f64) -> Self {
        self.residual = Some(tol);
        self
    }

    /// A rule must bound the run by iterations or time.
    pub fn validate(&self) -> Result<()> {
        if self.max_iters.is_none() && self.wall_clock.is_none() {
            return Err(Error::Config(
                "stop rule needs an iteration or wall-clock budget".into(),
            ));
        }
        Ok(())
    }

    pub(crate) fn before_step(
        &self,
        steps_done: usize,
        elapsed: Duration,
    ) -> Option<TerminationStatus> {
        if self.max_iters.is_some_and(|max| steps_done >= max) {
            return Some(TerminationStatus::MaxIters);
        }
        if self.wall_clock.is_some_and(|budget| elapsed >= budget) {
            return Some(TerminationStatus::WallClock);
        }
        None
    }

    pub(crate) fn after_step(
        &self,
        rel_iter: f64,
        rel_obj: f64,
        residual: f64,
    ) -> Option<TerminationStatus> {
        if self
            .rel_error
            .is_some_and(|eps| rel_iter.max(rel_obj) <= eps)
        {
            return Some(TerminationStatus::RelError);
        }
        if self.residual.is_some_and(|tol| residual <= tol) {
            return Some(TerminationStatus::Residual);
        }
        None
    }

    pub fn uses_wall_clock(&self) -> bool {
        self.wall_clock.is_some()
    }
}

impl fmt::Display for StopRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(n) = self.max_iters {
            parts.push(format!("iters:{n}"));
        }
        if let Some(d) = self.wall_clock {
            parts.push(format!("time:{:?}", d.as_secs_f64()));
        }
        if let Some(e) = self.rel_error {
            parts.push(format!("rel:{e:?}"));
        }
        if let Some(t) = self.residual {
            parts.push(format!("residual:{t:?}"));
        }
        f.write_str(&parts.join("|"))
    }
}

impl FromStr for StopRule {
    type Err = Error;

    /// `iters:N|time:S|rel:ε|residual:tol`, any subset, `|` or `,` separated.
    fn from_str(s: &str) -> Result<Self> {
        let mut rule = StopRule::default();
        for part in s.split(['|', ',']).map(str::trim).filter(|p| !p.is_empty()) {
            let bad = || Error::Config(format!("cannot parse stop rule term '{part}'"));
            let (key, value) = part.split_once(':').ok_or_else(bad)?;
            match key.trim() {
                "iters" => rule.max_iters = Some(value.trim().parse().map_err(|_| bad())?),
                "time" => {
                    let secs: f64 = value.trim().parse().map_err(|_| bad())?;
                    if !(secs >= 0.0) || !secs.is_finite() {
                        return Err(bad());
                    }
                    rule.wall_clock = Some(Duration::from_secs_f64(secs));
                }
                "rel" => rule.rel_error = Some(value.trim().parse().map_err(|_| bad())?),
                "residual" => rule.residual = Some(value.trim().parse().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        rule.validate()?;
        Ok(rule)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let rule: StopRule = "iters:100|time:2.5|rel:1e-5".parse().unwrap();
        assert_eq!(rule.max_iters, Some(100));
        assert_eq!(rule.wall_clock, Some(Duration::from_secs_f64(2.5)));
        assert_eq!(rule.rel_error, Some(1e-5));
        assert_eq!(rule.to_string().parse::<StopRule>().unwrap(), rule);
        assert!("rel:1e-5".parse::<StopRule>().is_err());
        assert!("iters:x".parse::<StopRule>().is_err());
        assert!("bogus:1".parse::<StopRule>().is_err());
    }

    #[test]
    fn or_combination() {
        let rule = StopRule::max_iters(10).or_rel_error(1e-3).or_residual(1e-8);
        assert_eq!(
            rule.before_step(10, Duration::ZERO),
            Some(TerminationStatus::MaxIters)
        );
        assert_eq!(rule.before_step(9, Duration::ZERO), None);
        assert_eq!(
            rule.after_step(1e-4, 2e-4, 1.0),
            Some(TerminationStatus::RelError)
        );
        assert_eq!(
            rule.after_step(1e-2, 0.0, 1e-9),
            Some(TerminationStatus::Residual)
        );
        assert_eq!(rule.after_step(2e-3, 0.0, 1.0), None);
    }
}
