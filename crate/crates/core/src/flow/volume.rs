use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::spectral::{apply_multiplier, fd_symbol, wavenumber};
use crate::grid::{integrate, RealField};
use crate::transverse::{ddbar, HermitianField};

/// Transverse volume form `Ω = e^F Ω₀`, stored through its density against
/// the flat coordinate volume.
#[derive(Clone, Debug, PartialEq)]
pub struct VolumeForm {
    /// Zero-mean potential with `i∂∂̄F = χ − i∂∂̄ log det g₀`.
    pub f: RealField,
    /// Normalized density, `∫density = ∫det g₀`.
    pub density: RealField,
    pub log_density: RealField,
    /// Postcondition residual `sup‖i∂∂̄F − (χ − i∂∂̄ log det g₀)‖`.
    pub residual: f64,
}

/// Solves for `F` by inverting the stencil symbol of `tr i∂∂̄` on the periodic
/// grid, then normalizes the density.
///
/// Fails with `InexactClass` when `χ − i∂∂̄ log det g₀` is not `i∂∂̄` of a
/// periodic function (e.g. a nonzero constant form).
pub fn build_volume_form(omega0: &HermitianField, chi: &HermitianField) -> Result<VolumeForm> {
    if !omega0.is_basic() || !chi.is_basic() {
        return Err(Error::NotBasic("reference form and class representative"));
    }
    let spec = omega0.spec().clone();
    let n = spec.n;
    let log_det0 = omega0.log_det()?;
    let target = chi.sub(&ddbar(&log_det0)?)?;
    let trace = target.trace();

    let axes: Vec<usize> = (0..2 * n).collect();
    let sym = |bins: &[usize]| -> f64 {
        -0.25
            * axes
                .iter()
                .map(|&a| {
                    let r = spec.resolution(a);
                    fd_symbol(wavenumber(bins[a], r, spec.period(a)), spec.spacing(a)).powi(2)
                })
                .sum::<f64>()
    };
    let h = spec.min_transverse_spacing();
    // Bins whose symbol vanishes (the mean and pure Nyquist combinations) carry no gradient.
    let cutoff = 1e-10 / (h * h);
    let f = apply_multiplier(&trace, &axes, |bins| {
        let s = sym(bins);
        if s.abs() < cutoff {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(1.0 / s, 0.0)
        }
    })?
    .re();
    let f = f.shift(-f.mean());

    let residual = ddbar(&f)?.sup_distance(&target)?;
    let tol = 1e-6 * target.sup_norm().max(1.0);
    if !(residual <= tol) {
        return Err(Error::InexactClass { residual });
    }

    let det0 = omega0.det();
    let raw = f.zip_with(&det0, |a, d| a.exp() * d)?;
    let c = integrate(&det0) / integrate(&raw);
    let density = raw.scale(c);
    let log_density = f.add(&log_det0)?.shift(c.ln());
    Ok(VolumeForm {
        f,
        density,
        log_density,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use super::*;
    use crate::grid::GridSpec;

    fn torus(n: usize, res: usize) -> Arc<GridSpec> {
        Arc::new(GridSpec::uniform(n, res, 2.0 * PI).unwrap())
    }

    #[test]
    fn flat_data_gives_trivial_volume() {
        let s = torus(1, 32);
        let g = HermitianField::identity(&s);
        let v = build_volume_form(&g, &HermitianField::zeros(&s, true)).unwrap();
        assert!(v.f.sup_norm() < 1e-15);
        assert!(v.density.values().iter().all(|&d| (d - 1.0).abs() < 1e-14));
    }

    #[test]
    fn bump_metric_gives_constant_density() {
        let s = torus(1, 64);
        let g = HermitianField::from_fn(&s, true, |c, m| {
            m[0] = Complex64::new(1.0 + 0.1 * c[0].cos(), 0.0)
        })
        .unwrap();
        let v = build_volume_form(&g, &HermitianField::zeros(&s, true)).unwrap();
        let mean_density = v.density.mean();
        assert!(v
            .density
            .values()
            .iter()
            .all(|&d| (d - mean_density).abs() < 1e-6));
        let expect = RealField::from_fn(&s, true, |c| -(1.0 + 0.1 * c[0].cos()).ln());
        let expect = expect.shift(-expect.mean());
        assert!(v.f.sub(&expect).unwrap().sup_norm() < 1e-6);
    }

    #[test]
    fn exact_class_is_recovered() {
        let s = torus(2, 16);
        let psi = RealField::from_fn(&s, true, |c| 0.2 * c[0].cos() + 0.1 * (c[1] + c[2]).sin());
        let chi = ddbar(&psi).unwrap();
        let v = build_volume_form(&HermitianField::identity(&s), &chi).unwrap();
        let expect = psi.shift(-psi.mean());
        assert!(v.f.sub(&expect).unwrap().sup_norm() < 1e-6);
    }

    #[test]
    fn constant_class_is_inexact() {
        let s = torus(1, 16);
        let chi = HermitianField::scaled_identity(&s, -1.0);
        let err = build_volume_form(&HermitianField::identity(&s), &chi).unwrap_err();
        assert!(matches!(err, Error::InexactClass { .. }));
    }
}
