use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds shared by the rank, clustering and hermiticity tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Singular values below `rank_rtol * sigma_max` count as zero.
    pub rank_rtol: f64,
    /// Eigenvalues closer than `eig_cluster_rtol * (1 + |λ|) * scale` are merged.
    pub eig_cluster_rtol: f64,
    pub hermiticity_atol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rank_rtol: 1e-9,
            eig_cluster_rtol: 1e-8,
            hermiticity_atol: 1e-12,
        }
    }
}

impl ToleranceConfig {
    pub fn new(rank_rtol: f64, eig_cluster_rtol: f64, hermiticity_atol: f64) -> Result<Self> {
        let cfg = Self {
            rank_rtol,
            eig_cluster_rtol,
            hermiticity_atol,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_rank_rtol(mut self, rank_rtol: f64) -> Result<Self> {
        self.rank_rtol = rank_rtol;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_rtol", self.rank_rtol),
            ("eig_cluster_rtol", self.eig_cluster_rtol),
            ("hermiticity_atol", self.hermiticity_atol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "tolerance {name} must be strictly positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}
