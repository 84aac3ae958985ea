use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerance profile used by every order comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Relative slack allowed below zero when testing positivity.
    pub psd_rel_tol: f64,
    /// Allowed anti-Hermitian residual, relative to `max(1, ‖M‖)`.
    pub hermitian_tol: f64,
    /// Band around zero inside which a gap counts as equality.
    pub equality_rel_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            psd_rel_tol: 1e-9,
            hermitian_tol: 1e-10,
            equality_rel_tol: 1e-7,
        }
    }
}

impl ToleranceConfig {
    pub fn with_psd_rel_tol(self, psd_rel_tol: f64) -> Self {
        Self { psd_rel_tol, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        for (name, value) in [
            ("psd_rel_tol", self.psd_rel_tol),
            ("hermitian_tol", self.hermitian_tol),
            ("equality_rel_tol", self.equality_rel_tol),
        ] {
            if !(value > 0.0 && value < 1e-2) {
                problems.push(format!("{name} must lie in (0, 1e-2), got {value}"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ToleranceConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_out_of_range() {
        let tol = ToleranceConfig::default().with_psd_rel_tol(0.5);
        assert!(matches!(tol.validate(), Err(Error::Validation(v)) if v.len() == 1));
        let tol = ToleranceConfig {
            hermitian_tol: 0.0,
            ..Default::default()
        };
        assert!(tol.validate().is_err());
    }
}
