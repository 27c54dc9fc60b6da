use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    /// Einstein constant of the target normal form, `-1` or `0`.
    pub class_k: i32,
    pub dt_initial: f64,
    pub dt_safety: f64,
    pub max_steps: usize,
    pub ricci_tolerance: f64,
    /// Evolve `∂ω/∂t = −Ric(ω) − ω` instead of `−Ric(ω)`.
    pub rescaled: bool,
    /// Add the leafwise Laplacian `½(∂²ₓ + ∂²ᵧ)φ` (needs leaf axes).
    pub extended: bool,
    pub positivity_floor: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            class_k: 0,
            dt_initial: 0.05,
            dt_safety: 1.0,
            max_steps: 10_000,
            ricci_tolerance: 1e-6,
            rescaled: false,
            extended: false,
            positivity_floor: 1e-8,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, why: &str| Err(Error::InvalidConfig(format!("{key}: {why}")));
        if !matches!(self.class_k, -1 | 0) {
            return bad("class_k", "must be -1 or 0");
        }
        if !(self.dt_initial > 0.0 && self.dt_initial.is_finite()) {
            return bad("dt_initial", "must be positive");
        }
        if !(self.dt_safety > 0.0 && self.dt_safety <= 1.0) {
            return bad("dt_safety", "must lie in (0, 1]");
        }
        if self.max_steps < 1 {
            return bad("max_steps", "must be at least 1");
        }
        if !(self.ricci_tolerance > 0.0) {
            return bad("ricci_tolerance", "must be positive");
        }
        if !(self.positivity_floor > 0.0) {
            return bad("positivity_floor", "must be positive");
        }
        Ok(())
    }
}
