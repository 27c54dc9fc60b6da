//! FFT-based operators on periodic grids, used as independent cross-checks of
//! the stencil calculus and for Poisson inversion.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::field::{ComplexField, FieldValue, RealField, ScalarField};
use crate::error::{Error, Result};

/// Signed mode number of FFT bin `i` on an `n`-point axis; the Nyquist bin maps to `-n/2`.
pub fn mode_number(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Angular wavenumber of bin `i`.
pub fn wavenumber(i: usize, n: usize, period: f64) -> f64 {
    2.0 * PI * mode_number(i, n) as f64 / period
}

/// Fourier symbol of the fourth-order first-derivative stencil divided by `i`.
pub fn fd_symbol(k: f64, h: f64) -> f64 {
    (8.0 * (k * h).sin() - (2.0 * k * h).sin()) / (6.0 * h)
}

fn transform_axis(
    data: &mut [Complex64],
    shape: &[usize],
    axis: usize,
    inverse: bool,
    planner: &mut FftPlanner<f64>,
) {
    let n = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let block = n * stride;
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for o in (0..data.len()).step_by(block) {
        for s in 0..stride {
            for i in 0..n {
                line[i] = data[o + i * stride + s];
            }
            fft.process(&mut line);
            for i in 0..n {
                data[o + i * stride + s] = line[i];
            }
        }
    }
}

/// Applies a Fourier multiplier over `axes`: forward FFT, multiply bin-wise by
/// `symbol(bins)` (bins indexed by stored axis), inverse FFT.
pub fn apply_multiplier<T: FieldValue>(
    f: &ScalarField<T>,
    axes: &[usize],
    symbol: impl Fn(&[usize]) -> Complex64,
) -> Result<ComplexField> {
    let spec = f.spec();
    let shape = spec.shape(f.is_basic());
    if let Some(&bad) = axes.iter().find(|&&a| a >= shape.len()) {
        return Err(Error::AxisOutOfRange {
            axis: bad,
            present: shape.len(),
        });
    }
    let mut data: Vec<Complex64> = f.values().iter().map(|v| v.to_complex()).collect();
    let mut planner = FftPlanner::new();
    for &a in axes {
        transform_axis(&mut data, &shape, a, false, &mut planner);
    }
    let norm: f64 = axes.iter().map(|&a| shape[a] as f64).product();
    let mut bins = vec![0usize; shape.len()];
    for (p, v) in data.iter_mut().enumerate() {
        let mut q = p;
        for a in (0..shape.len()).rev() {
            bins[a] = q % shape[a];
            q /= shape[a];
        }
        *v *= symbol(&bins) / norm;
    }
    for &a in axes {
        transform_axis(&mut data, &shape, a, true, &mut planner);
    }
    Ok(f.with_values(data))
}

/// Spectral first derivative along `axis`; the Nyquist bin is dropped.
pub fn spectral_derivative<T: FieldValue>(f: &ScalarField<T>, axis: usize) -> Result<ComplexField> {
    let spec = f.spec();
    if axis >= spec.axis_count(f.is_basic()) {
        if f.is_basic()
            && spec.is_full()
            && spec.is_leaf_axis(axis)
            && axis < spec.axis_count(false)
        {
            return Ok(ComplexField::zeros(spec, true));
        }
        return Err(Error::AxisOutOfRange {
            axis,
            present: spec.axis_count(false),
        });
    }
    let n = spec.resolution(axis);
    let period = spec.period(axis);
    apply_multiplier(f, &[axis], |bins| {
        if bins[axis] == n / 2 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, wavenumber(bins[axis], n, period))
        }
    })
}

/// Real part of [`spectral_derivative`] for real input.
pub fn spectral_derivative_real(f: &RealField, axis: usize) -> Result<RealField> {
    Ok(spectral_derivative(f, axis)?.re())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn spectral_derivative_is_exact_on_trig_polynomials() {
        let s = Arc::new(GridSpec::uniform(1, 16, 2.0 * PI).unwrap());
        let f = RealField::from_fn(&s, true, |c| (3.0 * c[0]).sin() * c[1].cos());
        let d = spectral_derivative_real(&f, 0).unwrap();
        let exact = RealField::from_fn(&s, true, |c| 3.0 * (3.0 * c[0]).cos() * c[1].cos());
        assert!(d.sub(&exact).unwrap().sup_norm() < 1e-12);
    }

    #[test]
    fn fd_symbol_matches_stencil_on_a_mode() {
        let s = Arc::new(GridSpec::uniform(1, 32, 2.0 * PI).unwrap());
        let h = s.spacing(0);
        let f = RealField::from_fn(&s, true, |c| (5.0 * c[0]).sin());
        let d = crate::grid::fd_derivative(&f, 0, 1).unwrap();
        let expect = RealField::from_fn(&s, true, |c| fd_symbol(5.0, h) * (5.0 * c[0]).cos());
        assert!(d.sub(&expect).unwrap().sup_norm() < 1e-12);
    }

    #[test]
    fn mode_numbers() {
        assert_eq!(mode_number(0, 8), 0);
        assert_eq!(mode_number(3, 8), 3);
        assert_eq!(mode_number(4, 8), -4);
        assert_eq!(mode_number(7, 8), -1);
    }
}
