//! Handling of cost evaluations that reach the edge of their domain.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{NesError, Result};

/// Floor applied to log arguments in [`BoundaryPolicy::Clamp`] mode.
pub const LOG_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryPolicy {
    /// Any domain violation is reported as an error.
    #[default]
    Strict,
    /// Log arguments are floored at [`LOG_FLOOR`], negative radicands and
    /// negative power bases at zero; every such event is counted.
    Clamp,
}

impl std::str::FromStr for BoundaryPolicy {
    type Err = NesError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(BoundaryPolicy::Strict),
            "clamp" => Ok(BoundaryPolicy::Clamp),
            other => Err(NesError::Usage(format!(
                "unknown boundary policy `{other}` (expected strict|clamp)"
            ))),
        }
    }
}

impl std::fmt::Display for BoundaryPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(match self {
            BoundaryPolicy::Strict => "strict",
            BoundaryPolicy::Clamp => "clamp",
        })
    }
}

/// Evaluation guard shared by every cost evaluation of one game.
///
/// Clones share the clamp counter.
#[derive(Debug, Clone, Default)]
pub struct Guard {
    policy: BoundaryPolicy,
    clamps: Arc<AtomicU64>,
}

impl Guard {
    pub fn new(policy: BoundaryPolicy) -> Self {
        Guard {
            policy,
            clamps: Arc::new(AtomicU64::new(0)),
        }
    }

    pub fn policy(&self) -> BoundaryPolicy {
        self.policy
    }

    pub fn clamp_count(&self) -> u64 {
        self.clamps.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.clamps.store(0, Ordering::Relaxed);
    }

    fn bump(&self) {
        self.clamps.fetch_add(1, Ordering::Relaxed);
    }

    /// Natural log with the domain check applied.
    pub fn ln(&self, a: f64, at: (f64, f64)) -> Result<f64> {
        if a > 0.0 && (self.policy == BoundaryPolicy::Strict || a >= LOG_FLOOR) {
            return Ok(a.ln());
        }
        match self.policy {
            BoundaryPolicy::Strict => Err(NesError::domain(
                at.0,
                at.1,
                format!("log of non-positive argument {a}"),
            )),
            BoundaryPolicy::Clamp if a.is_nan() => Err(NesError::domain(at.0, at.1, "log of NaN")),
            BoundaryPolicy::Clamp => {
                self.bump();
                Ok(LOG_FLOOR.ln())
            }
        }
    }

    /// Reciprocal of a log argument, floored like [`Guard::ln`]. Used by the
    /// analytic partials of log-barrier costs.
    pub fn recip_log_arg(&self, a: f64, at: (f64, f64)) -> Result<f64> {
        if a > 0.0 && (self.policy == BoundaryPolicy::Strict || a >= LOG_FLOOR) {
            return Ok(1.0 / a);
        }
        match self.policy {
            BoundaryPolicy::Strict => Err(NesError::domain(
                at.0,
                at.1,
                format!("log of non-positive argument {a}"),
            )),
            BoundaryPolicy::Clamp => {
                self.bump();
                Ok(1.0 / LOG_FLOOR)
            }
        }
    }

    pub fn sqrt(&self, a: f64, at: (f64, f64)) -> Result<f64> {
        if a >= 0.0 {
            return Ok(a.sqrt());
        }
        match self.policy {
            BoundaryPolicy::Strict => Err(NesError::domain(
                at.0,
                at.1,
                format!("sqrt of negative argument {a}"),
            )),
            BoundaryPolicy::Clamp => {
                self.bump();
                Ok(0.0)
            }
        }
    }

    /// `base^exp`; a negative base with a non-integer exponent is a domain
    /// violation.
    pub fn powf(&self, base: f64, exp: f64, at: (f64, f64)) -> Result<f64> {
        if base >= 0.0 || exp.fract() == 0.0 {
            return Ok(base.powf(exp));
        }
        match self.policy {
            BoundaryPolicy::Strict => Err(NesError::domain(
                at.0,
                at.1,
                format!("negative base {base} raised to non-integer power {exp}"),
            )),
            BoundaryPolicy::Clamp => {
                self.bump();
                Ok(0f64.powf(exp))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_rejects_nonpositive_log() {
        let g = Guard::new(BoundaryPolicy::Strict);
        assert!(g.ln(0.0, (0.0, 0.0)).unwrap_err().is_domain());
        assert!(g.ln(-1.0, (0.0, 0.0)).is_err());
        assert_eq!(g.ln(1.0, (0.0, 0.0)).unwrap(), 0.0);
        assert_eq!(g.clamp_count(), 0);
    }

    #[test]
    fn clamp_floors_and_counts() {
        let g = Guard::new(BoundaryPolicy::Clamp);
        let shared = g.clone();
        assert_eq!(g.ln(-3.0, (0.0, 0.0)).unwrap(), LOG_FLOOR.ln());
        assert_eq!(g.ln(1e-12, (0.0, 0.0)).unwrap(), LOG_FLOOR.ln());
        assert_eq!(g.sqrt(-1.0, (0.0, 0.0)).unwrap(), 0.0);
        assert_eq!(g.powf(-0.5, 1.1, (0.0, 0.0)).unwrap(), 0.0);
        assert_eq!(shared.clamp_count(), 4);
        g.reset();
        assert_eq!(shared.clamp_count(), 0);
    }

    #[test]
    fn integer_powers_of_negative_bases_are_fine() {
        let g = Guard::default();
        assert_eq!(g.powf(-2.0, 2.0, (0.0, 0.0)).unwrap(), 4.0);
        assert!(g.powf(-2.0, 0.5, (0.0, 0.0)).is_err());
    }
}
