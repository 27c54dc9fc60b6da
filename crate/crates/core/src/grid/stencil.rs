//! Fourth-order periodic central differences.
//!
//! Every stencil is written in difference form, `Σ w_m (f₊ₘ − f₋ₘ)` or
//! `Σ w_m (f₊ₘ + f₋ₘ − 2f₀)`, so constants are annihilated exactly rather than
//! up to round-off.

use num_complex::Complex64;

use super::field::{ComplexField, FieldValue, ScalarField};
use crate::error::{Error, Result};

const D1_WEIGHTS: [f64; 2] = [8.0, -1.0];
const D1_DENOM: f64 = 12.0;
const D2_WEIGHTS: [f64; 2] = [16.0, -1.0];
const D2_DENOM: f64 = 12.0;
// D1∘D1 folded into one 9-point stencil; keeps mixed partials consistent with the diagonal.
const D11_WEIGHTS: [f64; 4] = [16.0, 64.0, -16.0, 1.0];
const D11_DENOM: f64 = 144.0;

fn check_axis<T: FieldValue>(f: &ScalarField<T>, axis: usize) -> Result<()> {
    let present = f.spec().axis_count(false);
    if axis >= present {
        return Err(Error::AxisOutOfRange { axis, present });
    }
    Ok(())
}

/// `Σ w_m (f₊ₘ ∓ f₋ₘ)` along `axis`; `ODD` selects the antisymmetric form,
/// otherwise `Σ w_m ((f₊ₘ − f₀) + (f₋ₘ − f₀))`.
fn apply<T: FieldValue, const M: usize, const ODD: bool>(
    f: &ScalarField<T>,
    axis: usize,
    weights: &[f64; M],
    scale: f64,
) -> ScalarField<T> {
    let spec = f.spec();
    let basic = f.is_basic();
    let n = spec.resolution(axis);
    let stride = spec.stride(axis, basic);
    let block = n * stride;
    let src = f.values();
    let mut out = vec![T::ZERO; src.len()];
    // Neighbour offsets within one periodic line, computed once per call.
    let table: Vec<([usize; M], [usize; M])> = (0..n)
        .map(|i| {
            let plus = std::array::from_fn(|m| ((i + m + 1) % n) * stride);
            let minus = std::array::from_fn(|m| ((i + n - m - 1) % n) * stride);
            (plus, minus)
        })
        .collect();

    for o in (0..src.len()).step_by(block) {
        let line = &src[o..o + block];
        let dst = &mut out[o..o + block];
        if stride == 1 {
            for (i, (plus, minus)) in table.iter().enumerate() {
                let f0 = line[i];
                let mut acc = T::ZERO;
                for m in 0..M {
                    let (a, b) = (line[plus[m]], line[minus[m]]);
                    let d = if ODD { a - b } else { (a - f0) + (b - f0) };
                    acc = acc + d * weights[m];
                }
                dst[i] = acc * scale;
            }
            continue;
        }
        for (i, (plus, minus)) in table.iter().enumerate() {
            let row = i * stride;
            let f0 = &line[row..row + stride];
            let acc = &mut dst[row..row + stride];
            // Accumulating one neighbour pair at a time keeps the inner loops
            // contiguous; the summation order is the same as pointwise.
            for m in 0..M {
                let a = &line[plus[m]..plus[m] + stride];
                let b = &line[minus[m]..minus[m] + stride];
                let w = weights[m];
                for s in 0..stride {
                    let d = if ODD {
                        a[s] - b[s]
                    } else {
                        (a[s] - f0[s]) + (b[s] - f0[s])
                    };
                    acc[s] = acc[s] + d * w;
                }
            }
            for v in acc.iter_mut() {
                *v = *v * scale;
            }
        }
    }
    f.with_values(out)
}

/// Fourth-order periodic derivative of order 1 or 2 along `axis`.
///
/// A leaf-axis derivative of a basic field is identically zero.
pub fn fd_derivative<T: FieldValue>(
    f: &ScalarField<T>,
    axis: usize,
    order: u32,
) -> Result<ScalarField<T>> {
    check_axis(f, axis)?;
    if !(1..=2).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    if f.is_basic() && f.spec().is_leaf_axis(axis) {
        return Ok(ScalarField::zeros(f.spec(), true));
    }
    let h = f.spec().spacing(axis);
    Ok(match order {
        1 => apply::<T, 2, true>(f, axis, &D1_WEIGHTS, 1.0 / (D1_DENOM * h)),
        _ => apply::<T, 2, false>(f, axis, &D2_WEIGHTS, 1.0 / (D2_DENOM * h * h)),
    })
}

/// The composition `D1_a ∘ D1_b` of first-derivative stencils.
///
/// On the diagonal this is the wide 9-point operator, which is exactly the
/// square of the first-derivative stencil. All transverse Hessians are built
/// from this operator so that third derivatives commute at stencil level.
pub fn fd_d1d1<T: FieldValue>(f: &ScalarField<T>, a: usize, b: usize) -> Result<ScalarField<T>> {
    check_axis(f, a)?;
    check_axis(f, b)?;
    if f.is_basic() && (f.spec().is_leaf_axis(a) || f.spec().is_leaf_axis(b)) {
        return Ok(ScalarField::zeros(f.spec(), true));
    }
    if a == b {
        let h = f.spec().spacing(a);
        Ok(apply::<T, 4, false>(
            f,
            a,
            &D11_WEIGHTS,
            1.0 / (D11_DENOM * h * h),
        ))
    } else {
        let inner = fd_derivative(f, b, 1)?;
        fd_derivative(&inner, a, 1)
    }
}

/// `∂f/∂zʲ = ½(∂ₓ − i∂ᵧ)f` or, with `conjugate`, `∂f/∂z̄ʲ = ½(∂ₓ + i∂ᵧ)f`; `j` is 0-based.
pub fn wirtinger<T: FieldValue>(
    f: &ScalarField<T>,
    j: usize,
    conjugate: bool,
) -> Result<ComplexField> {
    let n = f.spec().n;
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, n });
    }
    let fx = fd_derivative(f, 2 * j, 1)?.to_complex();
    let fy = fd_derivative(f, 2 * j + 1, 1)?.to_complex();
    let sign = if conjugate { 1.0 } else { -1.0 };
    // (a ± i b)/2 componentwise, so conj(∂f) and ∂̄(conj f) agree bit for bit.
    fx.zip_with(&fy, |a: Complex64, b: Complex64| {
        Complex64::new(0.5 * (a.re - sign * b.im), 0.5 * (a.im + sign * b.re))
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use super::*;
    use crate::grid::{GridSpec, RealField};

    fn spec(n: usize, res: usize, period: f64) -> Arc<GridSpec> {
        Arc::new(GridSpec::uniform(n, res, period).unwrap())
    }

    fn max_err(a: &RealField, b: &RealField) -> f64 {
        a.sub(b).unwrap().sup_norm()
    }

    #[test]
    fn first_derivative_of_sine() {
        let l = 3.0;
        let s = spec(1, 128, l);
        let k = 2.0 * PI / l;
        let f = RealField::from_fn(&s, true, |c| (k * c[0]).sin());
        let exact = RealField::from_fn(&s, true, |c| k * (k * c[0]).cos());
        let d = fd_derivative(&f, 0, 1).unwrap();
        assert!(max_err(&d, &exact) / k < 1e-6);
    }

    #[test]
    fn second_derivative_of_sine() {
        let s = spec(1, 128, 2.0 * PI);
        let f = RealField::from_fn(&s, true, |c| c[1].sin());
        let d = fd_derivative(&f, 1, 2).unwrap();
        assert!(max_err(&d, &f.scale(-1.0)) < 1e-6);
    }

    #[test]
    fn constants_are_annihilated_exactly() {
        let s = Arc::new(
            GridSpec::uniform(2, 8, 1.3)
                .unwrap()
                .with_leaf(8, 0.7)
                .unwrap(),
        );
        let f = RealField::constant(&s, false, 0.123456789);
        for axis in 0..6 {
            for order in 1..=2 {
                assert!(fd_derivative(&f, axis, order)
                    .unwrap()
                    .values()
                    .iter()
                    .all(|&v| v == 0.0));
            }
            assert!(fd_d1d1(&f, axis, axis)
                .unwrap()
                .values()
                .iter()
                .all(|&v| v == 0.0));
        }
    }

    #[test]
    fn axis_and_order_validation() {
        let s = spec(1, 8, 1.0);
        let f = RealField::zeros(&s, true);
        assert!(matches!(
            fd_derivative(&f, 2, 1),
            Err(Error::AxisOutOfRange { .. })
        ));
        assert!(matches!(
            fd_derivative(&f, 0, 3),
            Err(Error::UnsupportedOrder(3))
        ));
        assert!(matches!(
            wirtinger(&f, 1, false),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn leaf_derivative_of_basic_field_is_zero() {
        let s = Arc::new(
            GridSpec::uniform(1, 16, 1.0)
                .unwrap()
                .with_leaf(8, 1.0)
                .unwrap(),
        );
        let f = RealField::from_fn(&s, true, |c| (2.0 * PI * c[0]).sin());
        for axis in [2, 3] {
            let d = fd_derivative(&f, axis, 1).unwrap();
            assert!(d.is_basic());
            assert!(d.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn wide_stencil_equals_composed_first_derivatives() {
        let s = spec(1, 32, 2.0 * PI);
        let f = RealField::from_fn(&s, true, |c| (c[0].sin() + 0.3 * (2.0 * c[0]).cos()).exp());
        let wide = fd_d1d1(&f, 0, 0).unwrap();
        let composed = fd_derivative(&fd_derivative(&f, 0, 1).unwrap(), 0, 1).unwrap();
        assert!(max_err(&wide, &composed) < 1e-12);
    }

    #[test]
    fn wirtinger_of_coordinates() {
        // Linear coordinates are not periodic; sin has unit slope at the origin,
        // which is enough to probe the ½ and ∓i/2 factors.
        let s = spec(1, 16, 2.0 * PI);
        let fx = RealField::from_fn(&s, true, |c| c[0].sin());
        let fy = RealField::from_fn(&s, true, |c| c[1].sin());
        let tol = 1e-3;
        let dz = wirtinger(&fx, 0, false).unwrap().values()[0];
        let dzb = wirtinger(&fx, 0, true).unwrap().values()[0];
        assert!((dz - Complex64::new(0.5, 0.0)).norm() < tol);
        assert!((dzb - Complex64::new(0.5, 0.0)).norm() < tol);
        let dz = wirtinger(&fy, 0, false).unwrap().values()[0];
        let dzb = wirtinger(&fy, 0, true).unwrap().values()[0];
        assert!((dz - Complex64::new(0.0, -0.5)).norm() < tol);
        assert!((dzb - Complex64::new(0.0, 0.5)).norm() < tol);
    }

    #[test]
    fn wirtinger_laplacian_of_cosine() {
        let s = spec(1, 128, 2.0 * PI);
        let f = RealField::from_fn(&s, true, |c| c[0].cos());
        let dz = wirtinger(&f, 0, false).unwrap();
        let dzdzb = wirtinger(&dz, 0, true).unwrap();
        let exact = RealField::from_fn(&s, true, |c| -0.25 * c[0].cos());
        assert!(max_err(&dzdzb.re(), &exact) < 1e-6);
        assert!(dzdzb.im().sup_norm() < 1e-12);
    }
}
