//! Periodic sampled fields over a foliated chart and their calculus.

mod field;
mod spec;
pub mod spectral;
mod stencil;

pub use field::{ComplexField, FieldValue, RealField, ScalarField};
pub use spec::GridSpec;
pub use stencil::{fd_d1d1, fd_derivative, wirtinger};

use serde::Serialize;

/// Midpoint-rule integral over the stored axes (spectrally accurate for periodic data).
pub fn integrate(f: &RealField) -> f64 {
    f.values().iter().sum::<f64>() * f.spec().cell_volume(f.is_basic())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Norms {
    pub sup: f64,
    pub l2: f64,
    pub mean: f64,
}

/// Sup norm over grid points, continuum L² norm, and arithmetic mean.
pub fn norms(f: &RealField) -> Norms {
    let sq = f.values().iter().map(|v| v * v).sum::<f64>() * f.spec().cell_volume(f.is_basic());
    Norms {
        sup: f.sup_norm(),
        l2: sq.sqrt(),
        mean: f.mean(),
    }
}

/// Least-squares slope of `log err` against `log h`.
pub fn fitted_order(spacings: &[f64], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = spacings.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
