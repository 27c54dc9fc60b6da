//! Named potentials and class representatives.
//!
//! Bumps act on the first complex coordinate with the fundamental wavenumber
//! `k = 2π/L` of the chart, scaled so that `g₁₁̄ = 1 + ε·(profile)`.

use std::f64::consts::PI;
use std::sync::Arc;

use vaisman_core::flow::FlowState;
use vaisman_core::transverse::{ddbar, metric_from_potential};
use vaisman_core::vaisman::{Potential, VaismanChart};
use vaisman_core::{GridSpec, HermitianField, RealField, Result};

use crate::config::{ChiPreset, ExperimentConfig, Preset};

/// Transverse potential `h` of the preset on a basic field of `spec`.
///
/// `cos_bump`: `h = −(4ε/k²) cos(kx¹)`, so `¼Δh = ε cos(kx¹)`.
/// `product_bump`: `h = −(4ε/2k²) cos(kx¹) cos(ky¹)`, so `¼Δh = ε cos(kx¹) cos(ky¹)`.
pub fn potential(spec: &Arc<GridSpec>, preset: Preset, amplitude: f64) -> RealField {
    let kx = 2.0 * PI / spec.period(0);
    let ky = 2.0 * PI / spec.period(1);
    match preset {
        Preset::Flat => RealField::zeros(spec, true),
        Preset::CosBump => {
            let c = -4.0 * amplitude / (kx * kx);
            RealField::from_fn(spec, true, |x| c * (kx * x[0]).cos())
        }
        Preset::ProductBump => {
            let c = -4.0 * amplitude / (kx * kx + ky * ky);
            RealField::from_fn(spec, true, |x| c * (kx * x[0]).cos() * (ky * x[1]).cos())
        }
    }
}

/// Chart of the configured preset at the given transverse resolution.
pub fn chart(config: &ExperimentConfig, resolution: usize, leaf: usize) -> Result<VaismanChart> {
    let mut c = config.clone();
    c.chart.resolution = resolution;
    let spec = Arc::new(c.grid_spec(Some(leaf))?);
    let h = potential(&spec, c.chart.preset, c.chart.amplitude);
    VaismanChart::from_potential(Potential::flat(h)?)
}

/// `ω̂₀ = δ + i∂∂̄h` of the preset and `χ` of the chosen representative.
pub fn initial_state(config: &ExperimentConfig) -> Result<FlowState> {
    let spec = Arc::new(config.grid_spec(config.chart.leaf_resolution)?);
    let h = potential(&spec, config.chart.preset, config.chart.amplitude);
    let omega0 = metric_from_potential(&h, &HermitianField::identity(&spec))?;
    let chi = match config.chi_preset {
        ChiPreset::Zero => HermitianField::zeros(&spec, true),
        ChiPreset::CosBump => {
            let k = 2.0 * PI / spec.period(0);
            let a = config.chi_amplitude;
            ddbar(&RealField::from_fn(&spec, true, |x| a * (k * x[0]).cos()))?
        }
    };
    FlowState::new(omega0, chi)
}
