//! Outcome record shared by every verification routine.

use crate::galg::{Coeff, Poly};
use std::fmt;

/// One verified identity: a stable key for the identity (`anchor`), whether it held,
/// and the residual rendered as text (empty when it vanished).
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub pass: bool,
    pub residual: String,
}

impl Check {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>, pass: bool, residual: impl Into<String>) -> Self {
        Check { name: name.into(), anchor: anchor.into(), pass, residual: residual.into() }
    }

    /// Passes iff the polynomial residual is zero.
    pub fn zero<C: Coeff>(name: impl Into<String>, anchor: impl Into<String>, residual: &Poly<C>) -> Self {
        let pass = residual.is_zero();
        Check::new(name, anchor, pass, if pass { String::new() } else { residual.to_string() })
    }

    /// Passes iff every listed residual is zero; residuals are joined with `; `.
    pub fn all_zero<C: Coeff>(name: impl Into<String>, anchor: impl Into<String>, residuals: &[(String, Poly<C>)]) -> Self {
        let bad: Vec<String> =
            residuals.iter().filter(|(_, p)| !p.is_zero()).map(|(k, p)| format!("{}: {}", k, p)).collect();
        Check::new(name, anchor, bad.is_empty(), bad.join("; "))
    }

    /// Numeric check against a tolerance.
    pub fn tol(name: impl Into<String>, anchor: impl Into<String>, value: f64, tol: f64) -> Self {
        let pass = value.is_finite() && value < tol;
        Check::new(name, anchor, pass, format!("{:.3e} (tol {:.0e})", value, tol))
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {} ({})", if self.pass { "pass" } else { "FAIL" }, self.name, self.anchor)?;
        if !self.residual.is_empty() {
            write!(f, " residual: {}", self.residual)?;
        }
        Ok(())
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}
