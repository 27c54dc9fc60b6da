//! Kernels for the small dense Hermitian matrices stored at each grid point.
//!
//! Matrices are row-major slices of length `n²`.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub const CONDITION_WARN: f64 = 1e8;

#[inline]
fn at(m: &[Complex64], n: usize, i: usize, j: usize) -> Complex64 {
    m[i * n + j]
}

/// Largest `|m − m*|` entry.
pub fn hermiticity_defect(m: &[Complex64], n: usize) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            d = d.max((at(m, n, i, j) - at(m, n, j, i).conj()).norm());
        }
    }
    d
}

/// Smallest and largest eigenvalue of a Hermitian matrix.
pub fn eigen_range(m: &[Complex64], n: usize) -> (f64, f64) {
    match n {
        1 => (m[0].re, m[0].re),
        2 => {
            let (a, d, b) = (m[0].re, m[3].re, m[1]);
            let mid = 0.5 * (a + d);
            let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            (mid - r, mid + r)
        }
        _ => {
            let ev = DMatrix::from_row_slice(n, n, m).symmetric_eigenvalues();
            (ev.min(), ev.max())
        }
    }
}

/// Lower Cholesky factor, or `None` when the matrix is not positive definite.
pub fn cholesky(m: &[Complex64], n: usize) -> Option<Vec<Complex64>> {
    let mut l = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        let mut d = at(m, n, j, j).re;
        for k in 0..j {
            d -= l[j * n + k].norm_sqr();
        }
        if !(d > 0.0) {
            return None;
        }
        let djj = d.sqrt();
        l[j * n + j] = Complex64::new(djj, 0.0);
        for i in (j + 1)..n {
            let mut s = at(m, n, i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = s / djj;
        }
    }
    Some(l)
}

/// `log det m` for a positive-definite Hermitian matrix.
pub fn log_det(m: &[Complex64], n: usize) -> Option<f64> {
    match n {
        1 => (m[0].re > 0.0).then(|| m[0].re.ln()),
        2 => {
            let det = m[0].re * m[3].re - m[1].norm_sqr();
            (m[0].re > 0.0 && det > 0.0).then(|| det.ln())
        }
        _ => cholesky(m, n).map(|l| (0..n).map(|i| 2.0 * l[i * n + i].re.ln()).sum()),
    }
}

/// Real determinant of a Hermitian matrix (no positivity assumed).
pub fn det(m: &[Complex64], n: usize) -> f64 {
    match n {
        1 => m[0].re,
        2 => m[0].re * m[3].re - m[1].norm_sqr(),
        _ => DMatrix::from_row_slice(n, n, m).determinant().re,
    }
}

/// General inverse by Gauss–Jordan elimination with partial pivoting.
pub fn inverse(m: &[Complex64], n: usize) -> Option<Vec<Complex64>> {
    if n == 1 {
        return (m[0].norm() > 0.0).then(|| vec![m[0].inv()]);
    }
    let mut a = m.to_vec();
    let mut inv = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        inv[i * n + i] = Complex64::new(1.0, 0.0);
    }
    let scale = m.iter().fold(0.0f64, |s, v| s.max(v.norm()));
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i * n + c].norm().total_cmp(&a[j * n + c].norm()))?;
        if a[p * n + c].norm() <= 1e-300_f64.max(scale * 1e-15) {
            return None;
        }
        if p != c {
            for k in 0..n {
                a.swap(p * n + k, c * n + k);
                inv.swap(p * n + k, c * n + k);
            }
        }
        let piv = a[c * n + c].inv();
        for k in 0..n {
            a[c * n + k] *= piv;
            inv[c * n + k] *= piv;
        }
        for r in 0..n {
            if r != c {
                let f = a[r * n + c];
                if f != Complex64::new(0.0, 0.0) {
                    for k in 0..n {
                        let (ack, ick) = (a[c * n + k], inv[c * n + k]);
                        a[r * n + k] -= f * ack;
                        inv[r * n + k] -= f * ick;
                    }
                }
            }
        }
    }
    Some(inv)
}
