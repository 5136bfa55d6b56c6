use serde::{Deserialize, Serialize};

use crate::error::{config, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    #[default]
    Default,
    Calibrated,
    User,
}

/// The constants `C0` (Lipschitz estimate) and `C1`, `C2` (energy inequality).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantSet {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    #[serde(default)]
    pub provenance: Provenance,
}

impl Default for ConstantSet {
    fn default() -> Self {
        Self {
            c0: 1.0,
            c1: 1.0,
            c2: 1.0,
            provenance: Provenance::Default,
        }
    }
}

impl ConstantSet {
    pub fn new(c0: f64, c1: f64, c2: f64, provenance: Provenance) -> Result<Self> {
        let c = Self { c0, c1, c2, provenance };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c0", self.c0), ("c1", self.c1), ("c2", self.c2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(config(format!("constants.{name} must be positive, got {v}")));
            }
        }
        if self.c0 < 1.0 {
            return Err(config(format!("constants.c0 must be at least 1, got {}", self.c0)));
        }
        Ok(())
    }

    /// `K = 1 + 16 (C2/C1)^2`.
    pub fn k(&self) -> f64 {
        let r = self.c2 / self.c1;
        1.0 + 16.0 * r * r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_for_equal_constants() {
        let c = ConstantSet::new(1.0, 3.0, 3.0, Provenance::User).unwrap();
        assert_eq!(c.k(), 17.0);
    }

    #[test]
    fn validation() {
        assert!(ConstantSet::new(0.5, 1.0, 1.0, Provenance::User).is_err());
        assert!(ConstantSet::new(1.0, 0.0, 1.0, Provenance::User).is_err());
        assert!(ConstantSet::new(1.0, 1.0, f64::NAN, Provenance::User).is_err());
        assert!(ConstantSet::default().validate().is_ok());
    }
}
