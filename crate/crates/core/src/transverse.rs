//! Transverse Kähler quantities on a chart: Hermitian coefficient fields,
//! `i∂∂̄`, log-determinants, Ricci forms and Christoffel symbols.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::spectral::{apply_multiplier, wavenumber};
use crate::grid::{fd_d1d1, wirtinger, ComplexField, GridSpec, RealField, ScalarField};
use crate::hermitian;

/// Minimum eigenvalue a metric must exceed to count as positive definite.
pub const POSITIVITY_TOLERANCE: f64 = 1e-10;
const HERMITIAN_TOLERANCE: f64 = 1e-12;

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// One `n×n` Hermitian matrix per grid point (row-major within each matrix).
///
/// Holds metric coefficients `g_{jk̄}`, Ricci coefficients `R_{jk̄}`, and the
/// coefficients `f_{jk̄}` of `i∂∂̄f`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianField {
    spec: Arc<GridSpec>,
    basic: bool,
    n: usize,
    data: Vec<Complex64>,
    positivity_checked: bool,
}

impl HermitianField {
    pub fn from_data(spec: Arc<GridSpec>, basic: bool, data: Vec<Complex64>) -> Result<Self> {
        let basic = basic || !spec.is_full();
        let n = spec.n;
        let expected = spec.len(basic) * n * n;
        if data.len() != expected {
            return Err(Error::SpecMismatch(format!(
                "expected {expected} matrix entries, got {}",
                data.len()
            )));
        }
        let field = HermitianField {
            spec,
            basic,
            n,
            data,
            positivity_checked: false,
        };
        for p in 0..field.points() {
            let m = field.matrix(p);
            let scale = m.iter().fold(1.0f64, |s, v| s.max(v.norm()));
            let defect = hermitian::hermiticity_defect(m, n);
            if !(defect <= HERMITIAN_TOLERANCE * scale) {
                return Err(Error::NotHermitian { point: p, defect });
            }
        }
        Ok(field)
    }

    fn from_parts(spec: Arc<GridSpec>, basic: bool, data: Vec<Complex64>) -> Self {
        let n = spec.n;
        debug_assert_eq!(data.len(), spec.len(basic) * n * n);
        HermitianField {
            spec,
            basic,
            n,
            data,
            positivity_checked: false,
        }
    }

    /// Same matrix at every point.
    pub fn constant(spec: &Arc<GridSpec>, basic: bool, matrix: &[Complex64]) -> Result<Self> {
        let basic = basic || !spec.is_full();
        let n = spec.n;
        if matrix.len() != n * n {
            return Err(Error::SpecMismatch(format!("expected an {n}×{n} matrix")));
        }
        let data = matrix
            .iter()
            .copied()
            .cycle()
            .take(spec.len(basic) * n * n)
            .collect();
        Self::from_data(spec.clone(), basic, data)
    }

    pub fn identity(spec: &Arc<GridSpec>) -> Self {
        Self::scaled_identity(spec, 1.0)
    }

    pub fn scaled_identity(spec: &Arc<GridSpec>, c: f64) -> Self {
        let n = spec.n;
        let mut m = vec![C0; n * n];
        for i in 0..n {
            m[i * n + i] = Complex64::new(c, 0.0);
        }
        Self::constant(spec, true, &m).expect("identity is Hermitian")
    }

    pub fn zeros(spec: &Arc<GridSpec>, basic: bool) -> Self {
        let basic = basic || !spec.is_full();
        Self::from_parts(
            spec.clone(),
            basic,
            vec![C0; spec.len(basic) * spec.n * spec.n],
        )
    }

    /// `f·I` for a real scalar field.
    pub fn diagonal(f: &RealField) -> Self {
        let n = f.spec().n;
        let mut data = vec![C0; f.len() * n * n];
        for (p, &v) in f.values().iter().enumerate() {
            for i in 0..n {
                data[p * n * n + i * n + i] = Complex64::new(v, 0.0);
            }
        }
        Self::from_parts(f.spec().clone(), f.is_basic(), data)
    }

    /// Samples a matrix-valued function; `f` writes the `n²` entries for the given coordinates.
    pub fn from_fn(
        spec: &Arc<GridSpec>,
        basic: bool,
        mut f: impl FnMut(&[f64], &mut [Complex64]),
    ) -> Result<Self> {
        let basic = basic || !spec.is_full();
        let n = spec.n;
        let mut data = vec![C0; spec.len(basic) * n * n];
        let mut c = vec![0.0; spec.axis_count(basic)];
        for (p, m) in data.chunks_mut(n * n).enumerate() {
            spec.coords_into(p, basic, &mut c);
            f(&c, m);
        }
        Self::from_data(spec.clone(), basic, data)
    }

    pub fn spec(&self) -> &Arc<GridSpec> {
        &self.spec
    }

    pub fn is_basic(&self) -> bool {
        self.basic
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> usize {
        self.data.len() / (self.n * self.n)
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn positivity_checked(&self) -> bool {
        self.positivity_checked
    }

    pub fn matrix(&self, p: usize) -> &[Complex64] {
        let nn = self.n * self.n;
        &self.data[p * nn..(p + 1) * nn]
    }

    /// Matrix at a full-grid point, broadcasting basic fields.
    pub fn matrix_at_full(&self, p: usize) -> &[Complex64] {
        if self.basic && self.spec.is_full() {
            self.matrix(p / self.spec.leaf_len())
        } else {
            self.matrix(p)
        }
    }

    pub fn entry(&self, p: usize, j: usize, k: usize) -> Complex64 {
        self.data[p * self.n * self.n + j * self.n + k]
    }

    pub fn entry_field(&self, j: usize, k: usize) -> ComplexField {
        let nn = self.n * self.n;
        let values = self
            .data
            .iter()
            .skip(j * self.n + k)
            .step_by(nn)
            .copied()
            .collect();
        ScalarField::from_values(self.spec.clone(), self.basic, values).expect("consistent layout")
    }

    fn zip(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if *self.spec != *other.spec {
            return Err(Error::SpecMismatch(
                "operands live on different grids".into(),
            ));
        }
        let nn = self.n * self.n;
        let data = if self.basic == other.basic {
            self.data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect()
        } else {
            let ll = self.spec.leaf_len();
            let (basic, full) = if self.basic {
                (self, other)
            } else {
                (other, self)
            };
            let mut out = Vec::with_capacity(full.data.len());
            for (m, block) in basic.data.chunks(nn).zip(full.data.chunks(nn * ll)) {
                for fm in block.chunks(nn) {
                    if self.basic {
                        out.extend(m.iter().zip(fm).map(|(&a, &b)| f(a, b)));
                    } else {
                        out.extend(fm.iter().zip(m).map(|(&a, &b)| f(a, b)));
                    }
                }
            }
            out
        };
        Ok(Self::from_parts(
            self.spec.clone(),
            self.basic && other.basic,
            data,
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_parts(
            self.spec.clone(),
            self.basic,
            self.data.iter().map(|&v| v * c).collect(),
        )
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.zip(other, |x, y| x * a + y * b)
    }

    pub fn to_full(&self) -> Self {
        if !self.basic || !self.spec.is_full() {
            return self.clone();
        }
        let ll = self.spec.leaf_len();
        let nn = self.n * self.n;
        let mut data = Vec::with_capacity(self.data.len() * ll);
        for m in self.data.chunks(nn) {
            for _ in 0..ll {
                data.extend_from_slice(m);
            }
        }
        HermitianField {
            basic: false,
            data,
            ..self.clone()
        }
    }

    /// Largest entry modulus over all points.
    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.sup_norm())
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (0..self.points())
            .map(|p| hermitian::hermiticity_defect(self.matrix(p), self.n))
            .fold(0.0, f64::max)
    }

    /// Global minimum and maximum eigenvalue, with the point attaining the minimum.
    pub fn eigen_range(&self) -> (f64, f64, usize) {
        let mut lo = (f64::INFINITY, 0);
        let mut hi = f64::NEG_INFINITY;
        for p in 0..self.points() {
            let (a, b) = hermitian::eigen_range(self.matrix(p), self.n);
            if a < lo.0 {
                lo = (a, p);
            }
            hi = hi.max(b);
        }
        (lo.0, hi, lo.1)
    }

    /// Fails with `PositivityLost` unless the minimum eigenvalue exceeds `floor`.
    pub fn check_positive(mut self, floor: f64) -> Result<Self> {
        let (min_eig, _, point) = self.eigen_range();
        if !(min_eig > floor) {
            return Err(Error::PositivityLost { point, min_eig });
        }
        self.positivity_checked = true;
        Ok(self)
    }

    pub fn log_det(&self) -> Result<RealField> {
        if self.n == 1 {
            let mut values = Vec::with_capacity(self.data.len());
            for (p, z) in self.data.iter().enumerate() {
                if !(z.re > 0.0) {
                    return Err(Error::NonPositiveDeterminant { point: p });
                }
                values.push(z.re.ln());
            }
            return RealField::from_values(self.spec.clone(), self.basic, values);
        }
        let values = (0..self.points())
            .map(|p| {
                hermitian::log_det(self.matrix(p), self.n)
                    .ok_or(Error::NonPositiveDeterminant { point: p })
            })
            .collect::<Result<Vec<_>>>()?;
        RealField::from_values(self.spec.clone(), self.basic, values)
    }

    pub fn det(&self) -> RealField {
        let values = (0..self.points())
            .map(|p| hermitian::det(self.matrix(p), self.n))
            .collect();
        RealField::from_values(self.spec.clone(), self.basic, values).expect("consistent layout")
    }

    pub fn trace(&self) -> RealField {
        let n = self.n;
        let values = (0..self.points())
            .map(|p| (0..n).map(|i| self.entry(p, i, i).re).sum())
            .collect();
        RealField::from_values(self.spec.clone(), self.basic, values).expect("consistent layout")
    }

    /// Pointwise `tr(self⁻¹ ·other)`.
    pub fn trace_against(&self, other: &Self) -> Result<RealField> {
        let n = self.n;
        let full = !self.basic || !other.basic;
        let pts = if full {
            self.spec.len(false)
        } else {
            self.points()
        };
        let mut values = Vec::with_capacity(pts);
        for p in 0..pts {
            let (a, b) = if full {
                (self.matrix_at_full(p), other.matrix_at_full(p))
            } else {
                (self.matrix(p), other.matrix(p))
            };
            let inv = hermitian::inverse(a, n).ok_or(Error::SingularMatrix { point: p })?;
            let mut t = C0;
            for i in 0..n {
                for k in 0..n {
                    t += inv[i * n + k] * b[k * n + i];
                }
            }
            values.push(t.re);
        }
        RealField::from_values(self.spec.clone(), !full, values)
    }
}

fn assemble(
    spec: &Arc<GridSpec>,
    basic: bool,
    n: usize,
    entry: impl Fn(usize, usize) -> Result<ComplexField>,
) -> Result<HermitianField> {
    let len = spec.len(basic);
    let mut data = vec![C0; len * n * n];
    for j in 0..n {
        for k in j..n {
            let e = entry(j, k)?;
            for (p, &v) in e.values().iter().enumerate() {
                let v = if j == k { Complex64::new(v.re, 0.0) } else { v };
                data[p * n * n + j * n + k] = v;
                data[p * n * n + k * n + j] = v.conj();
            }
        }
    }
    Ok(HermitianField::from_parts(spec.clone(), basic, data))
}

/// Coefficients `f_{jk̄} = ∂²f/∂zʲ∂z̄ᵏ` of `i∂∂̄f` by stencils.
///
/// Leaf coordinates are held fixed, so full fields are differentiated along
/// the transverse axes only.
pub fn ddbar(f: &RealField) -> Result<HermitianField> {
    let spec = f.spec();
    let n = spec.n;
    assemble(spec, f.is_basic(), n, |j, k| {
        let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
        if j == k {
            fd_d1d1(f, xj, xj)?.zip_with(&fd_d1d1(f, yj, yj)?, |a, b| {
                Complex64::new(0.25 * (a + b), 0.0)
            })
        } else {
            let re = fd_d1d1(f, xj, xk)?.add(&fd_d1d1(f, yj, yk)?)?;
            let im = fd_d1d1(f, xj, yk)?.sub(&fd_d1d1(f, yj, xk)?)?;
            re.zip_with(&im, |a, b| Complex64::new(0.25 * a, 0.25 * b))
        }
    })
}

/// Spectral `i∂∂̄` over the transverse axes; an independent check on [`ddbar`].
pub fn ddbar_spectral(f: &RealField) -> Result<HermitianField> {
    let spec = f.spec().clone();
    let n = spec.n;
    let axes: Vec<usize> = (0..2 * n).collect();
    let k_of = |bins: &[usize], a: usize| {
        let r = spec.resolution(a);
        if bins[a] == r / 2 {
            0.0
        } else {
            wavenumber(bins[a], r, spec.period(a))
        }
    };
    assemble(&spec, f.is_basic(), n, |j, k| {
        let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
        apply_multiplier(f, &axes, |bins| {
            let (a, b, c, d) = (
                k_of(bins, xj),
                k_of(bins, yj),
                k_of(bins, xk),
                k_of(bins, yk),
            );
            Complex64::new(-0.25 * (a * c + b * d), -0.25 * (a * d - b * c))
        })
    })
}

/// `g_{jk̄} = base_{jk̄} + ∂²h/∂zʲ∂z̄ᵏ`, checked positive definite.
pub fn metric_from_potential(h: &RealField, base: &HermitianField) -> Result<HermitianField> {
    if !h.is_basic() {
        return Err(Error::NotBasic("transverse potential"));
    }
    base.clone().check_positive(POSITIVITY_TOLERANCE)?;
    base.add(&ddbar(h)?)?.check_positive(POSITIVITY_TOLERANCE)
}

/// `R_{jk̄} = −∂²/∂zʲ∂z̄ᵏ log det g`.
pub fn ricci(g: &HermitianField) -> Result<HermitianField> {
    Ok(ddbar(&g.log_det()?)?.scale(-1.0))
}

/// `s = 2 g^{jk̄} R_{jk̄}`, the real-dimension scalar curvature convention.
pub fn scalar_curvature(g: &HermitianField, ric: &HermitianField) -> Result<RealField> {
    Ok(g.trace_against(ric)?.scale(2.0))
}

/// Christoffel symbols `Γᵏⱼₗ = g^{km̄} ∂_j g_{lm̄}` at every point.
#[derive(Clone, Debug)]
pub struct Christoffel {
    n: usize,
    data: Vec<Complex64>,
}

impl Christoffel {
    pub fn points(&self) -> usize {
        self.data.len() / self.n.pow(3)
    }

    /// `Γᵏⱼₗ` at point `p`.
    pub fn get(&self, p: usize, k: usize, j: usize, l: usize) -> Complex64 {
        let n = self.n;
        self.data[((p * n + k) * n + j) * n + l]
    }

    /// `sup |Γᵏⱼₗ − Γᵏₗⱼ|`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut d: f64 = 0.0;
        for p in 0..self.points() {
            for k in 0..n {
                for j in 0..n {
                    for l in (j + 1)..n {
                        d = d.max((self.get(p, k, j, l) - self.get(p, k, l, j)).norm());
                    }
                }
            }
        }
        d
    }

    /// `Σ_k Γᵏⱼₖ` as a field over points, for Jacobi's formula.
    pub fn contracted(&self, j: usize) -> Vec<Complex64> {
        (0..self.points())
            .map(|p| (0..self.n).map(|k| self.get(p, k, j, k)).sum())
            .collect()
    }
}

pub fn christoffel(g: &HermitianField) -> Result<Christoffel> {
    let n = g.n();
    // dg[(j*n + l)*n + m] = ∂_j g_{lm̄}
    let mut dg = Vec::with_capacity(n * n * n);
    for j in 0..n {
        for l in 0..n {
            for m in 0..n {
                dg.push(wirtinger(&g.entry_field(l, m), j, false)?);
            }
        }
    }
    let pts = g.points();
    let mut data = vec![C0; pts * n * n * n];
    let mut warned = false;
    for p in 0..pts {
        let a = g.matrix(p);
        let inv = hermitian::inverse(a, n).ok_or(Error::SingularMatrix { point: p })?;
        if !warned {
            let (lo, hi) = hermitian::eigen_range(a, n);
            if lo > 0.0 && hi / lo > hermitian::CONDITION_WARN {
                log::warn!("metric condition number {:.3e} at point {p}", hi / lo);
                warned = true;
            }
        }
        for k in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let mut s = C0;
                    for m in 0..n {
                        s += inv[m * n + k] * dg[(j * n + l) * n + m].values()[p];
                    }
                    data[((p * n + k) * n + j) * n + l] = s;
                }
            }
        }
    }
    Ok(Christoffel { n, data })
}

/// Residual of `Ric(g) − Ric(g̃) = i∂∂̄ log(det g̃ / det g)`.
///
/// The left side uses the stencil Ricci operator, the right side spectral
/// `i∂∂̄`, so the residual measures the truncation error of the stencils.
pub fn ricci_difference_check(g: &HermitianField, g_tilde: &HermitianField) -> Result<f64> {
    let lhs = ricci(g)?.sub(&ricci(g_tilde)?)?;
    let ratio = g_tilde.log_det()?.sub(&g.log_det()?)?;
    let rhs = ddbar_spectral(&ratio)?;
    lhs.sup_distance(&rhs)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn torus(n: usize, res: usize) -> Arc<GridSpec> {
        Arc::new(GridSpec::uniform(n, res, 2.0 * PI).unwrap())
    }

    fn bump_metric(spec: &Arc<GridSpec>, eps: f64) -> HermitianField {
        HermitianField::from_fn(spec, true, |c, m| {
            m[0] = Complex64::new(1.0 + eps * c[0].cos(), 0.0)
        })
        .unwrap()
    }

    #[test]
    fn flat_potential_gives_identity() {
        let s = torus(2, 16);
        let g = metric_from_potential(&RealField::zeros(&s, true), &HermitianField::identity(&s))
            .unwrap();
        assert_eq!(g, HermitianField::identity(&s).check_positive(0.0).unwrap());
    }

    #[test]
    fn cosine_potential_metric() {
        let s = torus(1, 128);
        let h = RealField::from_fn(&s, true, |c| -0.4 * c[0].cos());
        let g = metric_from_potential(&h, &HermitianField::identity(&s)).unwrap();
        assert!(g.sup_distance(&bump_metric(&s, 0.1)).unwrap() < 1e-6);
        assert!(g.positivity_checked());
    }

    #[test]
    fn inadmissible_potential_is_rejected() {
        let s = torus(1, 64);
        let h = RealField::from_fn(&s, true, |c| -8.0 * c[0].cos());
        assert!(matches!(
            metric_from_potential(&h, &HermitianField::identity(&s)),
            Err(Error::PositivityLost { .. })
        ));
    }

    #[test]
    fn ddbar_examples() {
        let s = torus(1, 128);
        assert_eq!(
            ddbar(&RealField::constant(&s, true, 2.5))
                .unwrap()
                .sup_norm(),
            0.0
        );
        let f = RealField::from_fn(&s, true, |c| -4.0 * c[0].cos());
        let expect = HermitianField::diagonal(&RealField::from_fn(&s, true, |c| c[0].cos()));
        assert!(ddbar(&f).unwrap().sup_distance(&expect).unwrap() < 1e-6);
        let f = RealField::from_fn(&s, true, |c| c[0].cos() * c[1].cos());
        let expect = HermitianField::diagonal(&RealField::from_fn(&s, true, |c| {
            -0.5 * c[0].cos() * c[1].cos()
        }));
        assert!(ddbar(&f).unwrap().sup_distance(&expect).unwrap() < 1e-6);
    }

    #[test]
    fn ddbar_off_diagonal_matches_spectral() {
        let s = torus(2, 32);
        let f = RealField::from_fn(&s, true, |c| {
            (c[0] + c[3]).sin() + 0.3 * (c[1] - c[2]).cos()
        });
        let a = ddbar(&f).unwrap();
        let b = ddbar_spectral(&f).unwrap();
        assert!(a.sup_distance(&b).unwrap() < 1e-4);
        assert!(a.hermiticity_defect() == 0.0);
    }

    #[test]
    fn log_det_examples() {
        let s = torus(2, 8);
        assert_eq!(
            HermitianField::identity(&s).log_det().unwrap().sup_norm(),
            0.0
        );
        let ld = HermitianField::scaled_identity(&s, 2.0).log_det().unwrap();
        assert!(ld.values().iter().all(|&v| (v - 4f64.ln()).abs() < 1e-15));
        let s1 = torus(1, 64);
        let ld = bump_metric(&s1, 0.1).log_det().unwrap();
        let exact = RealField::from_fn(&s1, true, |c| (1.0 + 0.1 * c[0].cos()).ln());
        assert!(ld.sub(&exact).unwrap().sup_norm() < 1e-12);
        let neg = HermitianField::scaled_identity(&s1, -1.0);
        assert!(matches!(
            neg.log_det(),
            Err(Error::NonPositiveDeterminant { .. })
        ));
    }

    #[test]
    fn ricci_of_bump_at_origin() {
        let s = torus(1, 128);
        let r = ricci(&bump_metric(&s, 0.1)).unwrap();
        assert!((r.entry(0, 0, 0).re - 0.1 / (4.0 * 1.1)).abs() < 2e-5);
        assert!(ricci(&HermitianField::identity(&s)).unwrap().sup_norm() < 1e-12);
    }

    #[test]
    fn christoffel_of_bump() {
        let s = torus(1, 128);
        let gam = christoffel(&bump_metric(&s, 0.1)).unwrap();
        for p in 0..128 {
            let x = s.coords(p, true)[0];
            let exact = -0.05 * x.sin() / (1.0 + 0.1 * x.cos());
            assert!((gam.get(p, 0, 0, 0) - Complex64::new(exact, 0.0)).norm() < 1e-5);
        }
        let flat = christoffel(&HermitianField::identity(&s)).unwrap();
        assert_eq!(
            (0..128)
                .map(|p| flat.get(p, 0, 0, 0).norm())
                .fold(0.0, f64::max),
            0.0
        );
    }

    #[test]
    fn christoffel_symmetry_and_jacobi() {
        let s = torus(2, 32);
        let h = RealField::from_fn(&s, true, |c| {
            0.1 * (c[0] + c[2]).cos() + 0.05 * (c[1] - c[3]).sin() * c[0].cos()
        });
        let g = metric_from_potential(&h, &HermitianField::identity(&s)).unwrap();
        let gam = christoffel(&g).unwrap();
        assert!(gam.symmetry_defect() < 1e-10);
        let ld = g.log_det().unwrap();
        for j in 0..2 {
            let dj = wirtinger(&ld, j, false).unwrap();
            let tr = gam.contracted(j);
            let err = tr
                .iter()
                .zip(dj.values())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-3, "Jacobi residual {err}");
        }
    }

    #[test]
    fn ricci_difference_examples() {
        let s = torus(1, 128);
        let g = bump_metric(&s, 0.1);
        assert!(ricci_difference_check(&g, &g).unwrap() < 1e-12);
        assert!(ricci_difference_check(&HermitianField::identity(&s), &g).unwrap() < 1e-5);
    }

    #[test]
    fn non_hermitian_data_is_rejected() {
        let s = torus(2, 8);
        let m = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.4, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        assert!(matches!(
            HermitianField::constant(&s, true, &m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn scalar_curvature_of_constant_fields() {
        let s = torus(2, 8);
        let g = HermitianField::scaled_identity(&s, 2.0);
        let r = HermitianField::scaled_identity(&s, 3.0);
        let sc = scalar_curvature(&g, &r).unwrap();
        assert!(sc.values().iter().all(|&v| (v - 6.0).abs() < 1e-14));
    }
}
