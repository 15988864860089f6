use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Model family and its defining parameters.
///
/// For the configuration model the exponent `tau` describes the degree law
/// that produced the degree sequence; for preferential attachment it is
/// derived as `3 + delta / m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelParams {
    Cm { tau: f64, d_min: u32 },
    Pam { m: u32, delta: f64 },
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelParams::Cm { tau, d_min } => {
                if !(tau > 2.0 && tau < 3.0) {
                    return Err(invalid(format!("tau must lie in (2,3), got {tau}")));
                }
                if d_min < 1 {
                    return Err(invalid("d_min must be at least 1"));
                }
            }
            ModelParams::Pam { m, delta } => {
                if m < 1 {
                    return Err(invalid("m must be at least 1"));
                }
                if !(delta > -(m as f64)) || !delta.is_finite() {
                    return Err(invalid(format!("delta must exceed -m, got {delta}")));
                }
            }
        }
        Ok(())
    }

    pub fn tau(&self) -> f64 {
        match *self {
            ModelParams::Cm { tau, .. } => tau,
            ModelParams::Pam { m, delta } => 3.0 + delta / m as f64,
        }
    }

    /// Number of children in a minimal exploration tree.
    pub fn d_fwd(&self) -> u32 {
        match *self {
            ModelParams::Cm { d_min, .. } => d_min.saturating_sub(1),
            ModelParams::Pam { m, .. } => m,
        }
    }

    /// Typical distance between two hubs: 1 in CM, 2 in PAM.
    pub fn c_dist(&self) -> u32 {
        match self {
            ModelParams::Cm { .. } => 1,
            ModelParams::Pam { .. } => 2,
        }
    }

    pub fn is_pam(&self) -> bool {
        matches!(self, ModelParams::Pam { .. })
    }
}

/// Round-half-up, used for every `k_n`-type threshold.
pub fn round_half_up(x: f64) -> i64 {
    (x + 0.5).floor() as i64
}
