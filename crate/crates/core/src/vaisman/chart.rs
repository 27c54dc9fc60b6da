use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::form::{ChartFn, CoefficientForm, Derivative};
use crate::error::{Error, Result};
use crate::grid::{fd_derivative, GridSpec, RealField};
use crate::hermitian::hermiticity_defect;
use crate::snapshot::Snapshot;
use crate::transverse::{ddbar, metric_from_potential, HermitianField};

/// Absolute tolerance of the algebraic chart identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn violation(identity: &str, residual: f64) -> Error {
    Error::IdentityViolation {
        identity: identity.to_string(),
        residual,
    }
}

/// Transverse Kähler potential `Σ B_{jk̄} zʲz̄ᵏ + h`: a constant Hermitian base
/// handled analytically plus a periodic basic part `h`.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    pub h: RealField,
    /// Row-major `n×n` Hermitian matrix `B`.
    pub base: Vec<Complex64>,
}

impl Potential {
    pub fn new(h: RealField, base: Vec<Complex64>) -> Result<Self> {
        let spec = h.spec();
        if !spec.is_full() {
            return Err(Error::InvalidGrid(
                "a foliated chart needs leaf axes".into(),
            ));
        }
        if !h.is_basic() {
            return Err(Error::NotBasic("transverse potential"));
        }
        let n = spec.n;
        if base.len() != n * n {
            return Err(Error::SpecMismatch(format!(
                "base has {} entries, expected {}",
                base.len(),
                n * n
            )));
        }
        let defect = hermiticity_defect(&base, n);
        if defect > 1e-12 {
            return Err(Error::NotHermitian { point: 0, defect });
        }
        Ok(Potential { h, base })
    }

    /// Potential over the flat base `Σ|zʲ|²`.
    pub fn flat(h: RealField) -> Result<Self> {
        let n = h.spec().n;
        let base = (0..n * n).map(|i| {
            if i % (n + 1) == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Potential::new(h, base.collect())
    }

    pub fn spec(&self) -> &Arc<GridSpec> {
        self.h.spec()
    }

    pub fn base_form(&self) -> HermitianField {
        HermitianField::constant(self.spec(), true, &self.base)
            .expect("base validated on construction")
    }

    /// Transverse metric `B + i∂∂̄h`, checked positive.
    pub fn metric(&self) -> Result<HermitianField> {
        metric_from_potential(&self.h, &self.base_form())
    }

    /// `∂/∂x^a` of the full potential for the `2n` transverse axes.
    pub fn gradient(&self) -> Result<Vec<ChartFn>> {
        let n = self.spec().n;
        (0..2 * n)
            .map(|a| {
                let mut f = ChartFn::periodic(fd_derivative(&self.h, a, 1)?);
                let j = a / 2;
                for k in 0..n {
                    let b = self.base[j * n + k];
                    if a % 2 == 0 {
                        f.slope[2 * k] += 2.0 * b.re;
                        f.slope[2 * k + 1] += 2.0 * b.im;
                    } else {
                        f.slope[2 * k + 1] += 2.0 * b.re;
                        f.slope[2 * k] -= 2.0 * b.im;
                    }
                }
                Ok(f)
            })
            .collect()
    }

    /// `dᶜh = (i/2)(∂̄ − ∂)h = ½Σ(h_{xʲ}dyʲ − h_{yʲ}dxʲ)` as coordinate coefficients.
    fn dc(&self) -> Result<Vec<ChartFn>> {
        let grad = self.gradient()?;
        Ok((0..grad.len())
            .map(|a| {
                if a % 2 == 0 {
                    grad[a + 1].scale(-0.5)
                } else {
                    grad[a - 1].scale(0.5)
                }
            })
            .collect())
    }
}

/// Per-point complex structure in coordinates, `(JX)^r = Σ_c J[r][c] X^c`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexStructure {
    spec: Arc<GridSpec>,
    entries: Vec<ChartFn>,
}

impl ComplexStructure {
    /// The standard structure `J₀`: `∂xʲ ↦ ∂yʲ`, `∂x ↦ ∂y`.
    pub fn standard(spec: &Arc<GridSpec>) -> Self {
        let d = spec.axis_count(false);
        let mut entries = vec![ChartFn::constant(spec, 0.0); d * d];
        for a in (0..d).step_by(2) {
            entries[(a + 1) * d + a] = ChartFn::constant(spec, 1.0);
            entries[a * d + a + 1] = ChartFn::constant(spec, -1.0);
        }
        ComplexStructure {
            spec: spec.clone(),
            entries,
        }
    }

    pub fn dim(&self) -> usize {
        self.spec.axis_count(false)
    }

    pub fn entry(&self, r: usize, c: usize) -> &ChartFn {
        &self.entries[r * self.dim() + c]
    }

    /// Row-major `D×D` matrices, one per transverse point.
    pub fn matrices(&self) -> Vec<f64> {
        pointwise(&self.entries, self.spec.transverse_len())
    }

    pub fn square_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for m in self.matrices().chunks(d * d) {
            for r in 0..d {
                for c in 0..d {
                    let sq: f64 = (0..d).map(|k| m[r * d + k] * m[k * d + c]).sum();
                    let target = if r == c { -1.0 } else { 0.0 };
                    worst = worst.max((sq - target).abs());
                }
            }
        }
        worst
    }
}

/// Evaluates basic chart functions into per-point blocks.
fn pointwise(entries: &[ChartFn], points: usize) -> Vec<f64> {
    let cols: Vec<Vec<f64>> = entries.iter().map(ChartFn::values).collect();
    let k = entries.len();
    let mut out = vec![0.0; points * k];
    for (i, col) in cols.iter().enumerate() {
        debug_assert_eq!(col.len(), points);
        for (p, v) in col.iter().enumerate() {
            out[p * k + i] = *v;
        }
    }
    out
}

/// `J = J₀ + ∂x ⊗ dᶜh + ∂y ⊗ (dᶜh∘J₀)`, checked to square to `−id`.
pub fn complex_structure(potential: &Potential) -> Result<ComplexStructure> {
    let spec = potential.spec();
    let mut j = ComplexStructure::standard(spec);
    let d = j.dim();
    let (xl, yl) = (spec.leaf_x_axis(), spec.leaf_y_axis());
    let dc = potential.dc()?;
    for (c, alpha) in dc.iter().enumerate() {
        // (dᶜh∘J₀)_c = α(J₀∂_c): ½∂h
        let beta = if c % 2 == 0 {
            dc[c + 1].clone()
        } else {
            dc[c - 1].scale(-1.0)
        };
        j.entries[xl * d + c] = alpha.clone();
        j.entries[yl * d + c] = beta;
    }
    let defect = j.square_defect();
    if !(defect <= IDENTITY_TOLERANCE) {
        return Err(violation("J^2 = -id", defect));
    }
    Ok(j)
}

/// The frame `X_j = ∂/∂zʲ − (i/2) h_{zʲ} ∂/∂y` of the transverse `(1,0)` bundle.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptedFrame {
    spec: Arc<GridSpec>,
    data: Vec<Complex64>,
}

impl AdaptedFrame {
    fn dim(&self) -> usize {
        self.spec.axis_count(false)
    }

    pub fn points(&self) -> usize {
        self.spec.transverse_len()
    }

    /// Coordinate components of `X_j` at a transverse point.
    pub fn x(&self, p: usize, j: usize) -> &[Complex64] {
        let (n, d) = (self.spec.n, self.dim());
        &self.data[(p * n + j) * d..(p * n + j + 1) * d]
    }

    pub fn x_bar(&self, p: usize, j: usize) -> Vec<Complex64> {
        self.x(p, j).iter().map(|z| z.conj()).collect()
    }

    /// Largest defect among `JX_j = iX_j`, `dzᵏ(X_j) = δᵏⱼ`, `θ(X_j) = θᶜ(X_j) = 0`.
    pub fn defect(
        &self,
        j: &ComplexStructure,
        theta: &CoefficientForm,
        theta_c: &CoefficientForm,
    ) -> Result<f64> {
        let (n, d) = (self.spec.n, self.dim());
        let jm = j.matrices();
        let th = covectors(theta)?;
        let thc = covectors(theta_c)?;
        let mut worst: f64 = 0.0;
        for p in 0..self.points() {
            let m = &jm[p * d * d..(p + 1) * d * d];
            for a in 0..n {
                let x = self.x(p, a);
                for r in 0..d {
                    let jx: Complex64 = (0..d).map(|c| x[c] * m[r * d + c]).sum();
                    worst = worst.max((jx - I * x[r]).norm());
                }
                for k in 0..n {
                    let dz = x[2 * k] + I * x[2 * k + 1];
                    let target = if k == a { 1.0 } else { 0.0 };
                    worst = worst.max((dz - target).norm());
                }
                for form in [&th, &thc] {
                    let v: Complex64 = (0..d).map(|c| x[c] * form[p * d + c]).sum();
                    worst = worst.max(v.norm());
                }
            }
        }
        Ok(worst)
    }
}

pub fn adapted_frame(potential: &Potential) -> Result<AdaptedFrame> {
    let spec = potential.spec().clone();
    let (n, d) = (spec.n, spec.axis_count(false));
    let grad = potential.gradient()?;
    let vals: Vec<Vec<f64>> = grad.iter().map(ChartFn::values).collect();
    let points = spec.transverse_len();
    let yl = spec.leaf_y_axis();
    let mut data = vec![Complex64::new(0.0, 0.0); points * n * d];
    for p in 0..points {
        for j in 0..n {
            let x = &mut data[(p * n + j) * d..(p * n + j + 1) * d];
            x[2 * j] = Complex64::new(0.5, 0.0);
            x[2 * j + 1] = Complex64::new(0.0, -0.5);
            let h_z = Complex64::new(0.5 * vals[2 * j][p], -0.5 * vals[2 * j + 1][p]);
            x[yl] = -0.5 * I * h_z;
        }
    }
    Ok(AdaptedFrame { spec, data })
}

/// Per-point coordinate components of a basic 1-form.
fn covectors(form: &CoefficientForm) -> Result<Vec<f64>> {
    if form.degree() != 1 {
        return Err(Error::SpecMismatch("expected a 1-form".into()));
    }
    let spec = form.spec();
    let d = spec.axis_count(false);
    let mut entries = vec![ChartFn::constant(spec, 0.0); d];
    for (idx, f) in form.components() {
        if !f.field.is_basic() {
            return Err(Error::NotBasic("1-form coefficients"));
        }
        entries[idx[0]] = f.clone();
    }
    Ok(pointwise(&entries, spec.transverse_len()))
}

/// Per-point antisymmetric coefficient matrices of a basic 2-form.
fn two_form_matrices(form: &CoefficientForm) -> Result<Vec<f64>> {
    if form.degree() != 2 {
        return Err(Error::SpecMismatch("expected a 2-form".into()));
    }
    let spec = form.spec();
    let d = spec.axis_count(false);
    let mut entries = vec![ChartFn::constant(spec, 0.0); d * d];
    for (idx, f) in form.components() {
        if !f.field.is_basic() {
            return Err(Error::NotBasic("2-form coefficients"));
        }
        entries[idx[0] * d + idx[1]] = f.clone();
        entries[idx[1] * d + idx[0]] = f.scale(-1.0);
    }
    Ok(pointwise(&entries, spec.transverse_len()))
}

fn lee_form(spec: &Arc<GridSpec>) -> CoefficientForm {
    let mut theta = CoefficientForm::zero(spec, 1);
    theta
        .accumulate(&[spec.leaf_x_axis()], ChartFn::constant(spec, 1.0))
        .expect("leaf axis exists");
    theta
}

/// `θᶜ = −θ∘J`, by contraction.
fn anti_lee(theta: &CoefficientForm, j: &ComplexStructure) -> Result<CoefficientForm> {
    let d = j.dim();
    let mut out = CoefficientForm::zero(theta.spec(), 1);
    for (idx, t) in theta.components() {
        for c in 0..d {
            let e = j.entry(idx[0], c);
            if e.as_constant() == Some(0.0) {
                continue;
            }
            out.accumulate(&[c], t.mul(e)?.scale(-1.0))?;
        }
    }
    Ok(out)
}

/// `max |θ(U) − 1|, |θᶜ(V) − 1|, |θ(V)|, |θᶜ(U)|` over the chart.
fn lee_defect(theta: &CoefficientForm, theta_c: &CoefficientForm) -> f64 {
    let spec = theta.spec();
    let (u, v) = (spec.leaf_x_axis(), spec.leaf_y_axis());
    let dev = |form: &CoefficientForm, axis: usize, target: f64| match form.get(&[axis]) {
        Some(f) => f
            .values()
            .iter()
            .fold(0.0f64, |m, x| m.max((x - target).abs())),
        None => target.abs(),
    };
    dev(theta, u, 1.0)
        .max(dev(theta_c, v, 1.0))
        .max(dev(theta, v, 0.0))
        .max(dev(theta_c, u, 0.0))
}

/// Lee form `θ = dx` and anti-Lee form `θᶜ = −θ∘J = dy − dᶜh`.
pub fn lee_forms(potential: &Potential) -> Result<(CoefficientForm, CoefficientForm)> {
    let j = complex_structure(potential)?;
    let theta = lee_form(potential.spec());
    let theta_c = anti_lee(&theta, &j)?;
    let defect = lee_defect(&theta, &theta_c);
    if !(defect <= IDENTITY_TOLERANCE) {
        return Err(violation("theta^c(V) = 1", defect));
    }
    Ok((theta, theta_c))
}

/// `ω = dθᶜ − θ∧θᶜ` with the stencil exterior derivative.
pub fn fundamental_form(
    theta: &CoefficientForm,
    theta_c: &CoefficientForm,
) -> Result<CoefficientForm> {
    theta_c
        .exterior_derivative(Derivative::Stencil)?
        .sub(&theta.wedge(theta_c)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VaismanResiduals {
    /// `sup‖dω − θ∧ω‖`
    pub r1: f64,
    /// `sup‖dθ‖`
    pub r2: f64,
}

/// Residuals of `dω = θ∧ω` and `dθ = 0`.
///
/// The exterior derivative here is spectral, independent of the stencil used
/// to build `ω`, so `r1` measures the truncation error of the construction.
pub fn verify_vaisman(
    omega: &CoefficientForm,
    theta: &CoefficientForm,
) -> Result<VaismanResiduals> {
    let r1 = omega
        .exterior_derivative(Derivative::Spectral)?
        .sub(&theta.wedge(omega)?)?
        .sup_norm();
    let r2 = theta.exterior_derivative(Derivative::Spectral)?.sup_norm();
    Ok(VaismanResiduals { r1, r2 })
}

/// Per-point real symmetric `D×D` tensors over the transverse points.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricTensor {
    spec: Arc<GridSpec>,
    data: Vec<f64>,
}

impl MetricTensor {
    pub fn dim(&self) -> usize {
        self.spec.axis_count(false)
    }

    pub fn points(&self) -> usize {
        self.spec.transverse_len()
    }

    pub fn at(&self, p: usize) -> &[f64] {
        let d2 = self.dim() * self.dim();
        &self.data[p * d2..(p + 1) * d2]
    }

    /// Complex-bilinear `g(X, Y)`.
    pub fn eval(&self, p: usize, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        let (d, m) = (self.dim(), self.at(p));
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..d {
            for b in 0..d {
                if m[a * d + b] != 0.0 {
                    acc += x[a] * m[a * d + b] * y[b];
                }
            }
        }
        acc
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn symmetry_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for p in 0..self.points() {
            let m = self.at(p);
            for a in 0..d {
                for b in a + 1..d {
                    worst = worst.max((m[a * d + b] - m[b * d + a]).abs());
                }
            }
        }
        worst
    }

    /// `max |g(JX, JY) − g(X, Y)|` over coordinate vectors.
    pub fn compatibility_defect(&self, j: &ComplexStructure) -> f64 {
        let d = self.dim();
        let jm = j.matrices();
        let mut worst: f64 = 0.0;
        for p in 0..self.points() {
            let (g, m) = (self.at(p), &jm[p * d * d..(p + 1) * d * d]);
            for a in 0..d {
                for b in 0..d {
                    let mut s = 0.0;
                    for r in 0..d {
                        for c in 0..d {
                            s += m[r * d + a] * g[r * d + c] * m[c * d + b];
                        }
                    }
                    worst = worst.max((s - g[a * d + b]).abs());
                }
            }
        }
        worst
    }

    /// `g(X_j, X̄_k)`.
    pub fn transverse_block(&self, frame: &AdaptedFrame) -> Result<HermitianField> {
        let n = self.spec.n;
        let mut data = Vec::with_capacity(self.points() * n * n);
        for p in 0..self.points() {
            for j in 0..n {
                for k in 0..n {
                    data.push(self.eval(p, frame.x(p, j), &frame.x_bar(p, k)));
                }
            }
        }
        HermitianField::from_data(self.spec.clone(), true, data)
    }

    /// `a·g + (a² − a)(θᶜ⊗θᶜ + θ⊗θ)`.
    pub fn q_homothetic(
        &self,
        a: f64,
        theta: &CoefficientForm,
        theta_c: &CoefficientForm,
    ) -> Result<MetricTensor> {
        if !(a > 0.0) {
            return Err(Error::NonPositiveScale(a));
        }
        let d = self.dim();
        let (th, thc) = (covectors(theta)?, covectors(theta_c)?);
        let c = a * a - a;
        let mut data = self.data.clone();
        for p in 0..self.points() {
            let (t, tc) = (&th[p * d..(p + 1) * d], &thc[p * d..(p + 1) * d]);
            for r in 0..d {
                for s in 0..d {
                    let i = p * d * d + r * d + s;
                    data[i] = a * data[i] + c * (tc[r] * tc[s] + t[r] * t[s]);
                }
            }
        }
        Ok(MetricTensor {
            spec: self.spec.clone(),
            data,
        })
    }
}

/// `g(X, Y) = −ω(X, JY)`, i.e. `G = −ΩJ`.
pub fn metric_tensor(omega: &CoefficientForm, j: &ComplexStructure) -> Result<MetricTensor> {
    let spec = omega.spec().clone();
    let d = spec.axis_count(false);
    let om = two_form_matrices(omega)?;
    let jm = j.matrices();
    let mut data = vec![0.0; om.len()];
    for p in 0..spec.transverse_len() {
        let o = p * d * d;
        for a in 0..d {
            for b in 0..d {
                data[o + a * d + b] = -(0..d)
                    .map(|c| om[o + a * d + c] * jm[o + c * d + b])
                    .sum::<f64>();
            }
        }
    }
    Ok(MetricTensor { spec, data })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InvariantReport {
    pub j_square: f64,
    pub lee: f64,
    pub compatibility: f64,
    pub symmetry: f64,
    pub basic: bool,
}

impl InvariantReport {
    /// First failing identity, if any.
    pub fn failure(&self) -> Option<(&'static str, f64)> {
        let tol = IDENTITY_TOLERANCE;
        if !(self.j_square <= tol) {
            return Some(("J^2 = -id", self.j_square));
        }
        if !(self.lee <= tol) {
            return Some(("theta(U) = theta^c(V) = 1", self.lee));
        }
        if !(self.compatibility <= tol) {
            return Some(("g(J., J.) = g", self.compatibility));
        }
        if !(self.symmetry <= tol) {
            return Some(("g symmetric", self.symmetry));
        }
        if !self.basic {
            return Some(("basic coefficients", f64::INFINITY));
        }
        None
    }
}

/// A foliated chart of a Vaisman manifold built from a transverse potential.
#[derive(Clone, Debug, PartialEq)]
pub struct VaismanChart {
    potential: Potential,
    j: ComplexStructure,
    theta: CoefficientForm,
    theta_c: CoefficientForm,
    omega: CoefficientForm,
}

impl VaismanChart {
    /// Builds every tensor and runs the invariant suite; fails on the first violation.
    pub fn from_potential(potential: Potential) -> Result<Self> {
        potential.metric()?;
        let j = complex_structure(&potential)?;
        let theta = lee_form(potential.spec());
        let theta_c = anti_lee(&theta, &j)?;
        let omega = fundamental_form(&theta, &theta_c)?;
        let chart = VaismanChart {
            potential,
            j,
            theta,
            theta_c,
            omega,
        };
        if let Some((identity, residual)) = chart.invariants()?.failure() {
            return Err(violation(identity, residual));
        }
        Ok(chart)
    }

    pub fn flat(spec: &Arc<GridSpec>) -> Result<Self> {
        VaismanChart::from_potential(Potential::flat(RealField::zeros(spec, true))?)
    }

    pub fn spec(&self) -> &Arc<GridSpec> {
        self.potential.spec()
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn h(&self) -> &RealField {
        &self.potential.h
    }

    pub fn complex_structure(&self) -> &ComplexStructure {
        &self.j
    }

    pub fn theta(&self) -> &CoefficientForm {
        &self.theta
    }

    pub fn theta_c(&self) -> &CoefficientForm {
        &self.theta_c
    }

    pub fn omega(&self) -> &CoefficientForm {
        &self.omega
    }

    pub fn invariants(&self) -> Result<InvariantReport> {
        let g = self.metric()?;
        Ok(InvariantReport {
            j_square: self.j.square_defect(),
            lee: lee_defect(&self.theta, &self.theta_c),
            compatibility: g.compatibility_defect(&self.j),
            symmetry: g.symmetry_defect(),
            basic: self.theta.is_basic() && self.theta_c.is_basic() && self.omega.is_basic(),
        })
    }

    pub fn metric(&self) -> Result<MetricTensor> {
        metric_tensor(&self.omega, &self.j)
    }

    pub fn frame(&self) -> Result<AdaptedFrame> {
        adapted_frame(&self.potential)
    }

    pub fn residuals(&self) -> Result<VaismanResiduals> {
        verify_vaisman(&self.omega, &self.theta)
    }

    /// `g_{jk̄} = i·ω(∂/∂zʲ, ∂/∂z̄ᵏ)`, read off the transverse block of `ω`.
    pub fn transverse_metric(&self) -> Result<HermitianField> {
        let spec = self.spec().clone();
        let (n, d) = (spec.n, spec.axis_count(false));
        let om = two_form_matrices(&self.omega)?;
        let mut data = Vec::with_capacity(spec.transverse_len() * n * n);
        for m in om.chunks(d * d) {
            let w = |a: usize, b: usize| m[a * d + b];
            for j in 0..n {
                for k in 0..n {
                    let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
                    let pair = Complex64::new(w(xj, xk) + w(yj, yk), w(xj, yk) - w(yj, xk)) * 0.25;
                    data.push(I * pair);
                }
            }
        }
        HermitianField::from_data(spec, true, data)
    }

    /// Deformation by a basic function: `h ↦ h + φ`, so `ω^T ↦ ω^T + i∂∂̄φ`.
    pub fn deform(&self, phi: &RealField) -> Result<Self> {
        if !phi.is_basic() {
            return Err(Error::NotBasic("deformation potential"));
        }
        let h = self.potential.h.add(phi)?;
        let next = VaismanChart::from_potential(Potential {
            h,
            base: self.potential.base.clone(),
        })?;
        let expect = self.transverse_metric()?.add(&ddbar(phi)?)?;
        let defect = next.transverse_metric()?.sup_distance(&expect)?;
        if !(defect <= IDENTITY_TOLERANCE) {
            return Err(violation("omega^T(t) = omega^T + i ddbar phi", defect));
        }
        Ok(next)
    }

    pub fn q_homothety(&self, a: f64) -> Result<MetricTensor> {
        self.metric()?.q_homothetic(a, &self.theta, &self.theta_c)
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Component {
            index: Vec<usize>,
            values: Vec<f64>,
        }
        #[derive(Serialize)]
        struct ChartSnapshot {
            spec: GridSpec,
            h: Snapshot,
            base: Vec<[f64; 2]>,
            theta: Vec<Component>,
            theta_c: Vec<Component>,
            omega: Vec<Component>,
            #[serde(rename = "J")]
            j: Vec<f64>,
        }
        let comps = |f: &CoefficientForm| -> Vec<Component> {
            f.components()
                .map(|(k, v)| Component {
                    index: k.clone(),
                    values: v.values(),
                })
                .collect()
        };
        let snap = ChartSnapshot {
            spec: (**self.spec()).clone(),
            h: Snapshot::from_real(&self.potential.h),
            base: self.potential.base.iter().map(|z| [z.re, z.im]).collect(),
            theta: comps(&self.theta),
            theta_c: comps(&self.theta_c),
            omega: comps(&self.omega),
            j: self.j.matrices(),
        };
        Ok(serde_json::to_string(&snap)?)
    }
}
