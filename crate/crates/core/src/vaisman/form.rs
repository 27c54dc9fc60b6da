use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::spectral::spectral_derivative_real;
use crate::grid::{fd_derivative, GridSpec, RealField};

/// How exterior derivatives are discretized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Derivative {
    Stencil,
    Spectral,
}

/// A coefficient function on the chart: a periodic sampled part plus an
/// affine part `Σ slope_a · x^a`.
///
/// The affine part carries the flat base potential, whose first derivatives
/// are linear in the coordinates and hence not periodic.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartFn {
    pub field: RealField,
    pub slope: Vec<f64>,
}

impl ChartFn {
    pub fn constant(spec: &Arc<GridSpec>, c: f64) -> Self {
        ChartFn {
            field: RealField::constant(spec, true, c),
            slope: vec![0.0; spec.axis_count(false)],
        }
    }

    pub fn periodic(field: RealField) -> Self {
        let d = field.spec().axis_count(false);
        ChartFn {
            field,
            slope: vec![0.0; d],
        }
    }

    pub fn spec(&self) -> &Arc<GridSpec> {
        self.field.spec()
    }

    pub fn is_affine_free(&self) -> bool {
        self.slope.iter().all(|&s| s == 0.0)
    }

    /// `Some(c)` when the function is the constant `c`.
    pub fn as_constant(&self) -> Option<f64> {
        let v = self.field.values();
        (self.is_affine_free() && v.iter().all(|&x| x == v[0])).then(|| v[0])
    }

    pub fn is_basic(&self) -> bool {
        let n = self.spec().n;
        self.field.is_basic() && self.slope[2 * n..].iter().all(|&s| s == 0.0)
    }

    pub fn derivative(&self, axis: usize, method: Derivative) -> Result<ChartFn> {
        let d = match method {
            Derivative::Stencil => fd_derivative(&self.field, axis, 1)?,
            Derivative::Spectral => spectral_derivative_real(&self.field, axis)?,
        };
        let s = self.slope[axis];
        let field = if s == 0.0 { d } else { d.shift(s) };
        Ok(ChartFn::periodic(field))
    }

    pub fn scale(&self, c: f64) -> ChartFn {
        ChartFn {
            field: self.field.scale(c),
            slope: self.slope.iter().map(|s| s * c).collect(),
        }
    }

    pub fn add(&self, other: &ChartFn) -> Result<ChartFn> {
        Ok(ChartFn {
            field: self.field.add(&other.field)?,
            slope: self
                .slope
                .iter()
                .zip(&other.slope)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &ChartFn) -> Result<ChartFn> {
        self.add(&other.scale(-1.0))
    }

    /// Product; fails when the result would be quadratic in the coordinates.
    pub fn mul(&self, other: &ChartFn) -> Result<ChartFn> {
        if let Some(c) = self.as_constant() {
            return Ok(other.scale(c));
        }
        if let Some(c) = other.as_constant() {
            return Ok(self.scale(c));
        }
        if self.is_affine_free() && other.is_affine_free() {
            return Ok(ChartFn::periodic(
                self.field.zip_with(&other.field, |a, b| a * b)?,
            ));
        }
        Err(Error::NonAffineProduct)
    }

    /// Value at a point of the function's own storage (basic or full).
    pub fn value(&self, p: usize, coords: &[f64]) -> f64 {
        let affine: f64 = self.slope.iter().zip(coords).map(|(s, x)| s * x).sum();
        self.field.values()[p] + affine
    }

    /// Point values over the function's own storage.
    pub fn values(&self) -> Vec<f64> {
        let spec = self.spec();
        let basic = self.field.is_basic();
        let mut c = vec![0.0; spec.axis_count(false)];
        (0..self.field.len())
            .map(|p| {
                spec.coords_into(p, basic, &mut c[..spec.axis_count(basic)]);
                self.value(p, &c)
            })
            .collect()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Value at a basic (transverse) point; the function must be basic.
    pub fn value_at_basic(&self, p: usize, coords: &[f64]) -> f64 {
        debug_assert!(self.field.is_basic());
        self.value(p, coords)
    }
}

/// A differential form in the real coordinate coframe `{dx¹, dy¹, …, dx, dy}`.
///
/// Components are keyed by strictly increasing axis tuples; missing keys are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientForm {
    spec: Arc<GridSpec>,
    degree: usize,
    components: BTreeMap<Vec<usize>, ChartFn>,
}

/// Sign of the permutation that sorts `idx`, or `None` on repeated entries.
fn sort_sign(idx: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut v = idx.to_vec();
    let mut sign = 1.0;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] == v[j + 1] {
                return None;
            }
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

impl CoefficientForm {
    pub fn zero(spec: &Arc<GridSpec>, degree: usize) -> Self {
        CoefficientForm {
            spec: spec.clone(),
            degree,
            components: BTreeMap::new(),
        }
    }

    pub fn spec(&self) -> &Arc<GridSpec> {
        &self.spec
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dimension(&self) -> usize {
        self.spec.axis_count(false)
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &ChartFn)> {
        self.components.iter()
    }

    /// Adds `f` to the component `idx` (any order; the permutation sign is applied).
    pub fn accumulate(&mut self, idx: &[usize], f: ChartFn) -> Result<()> {
        if idx.len() != self.degree || idx.iter().any(|&a| a >= self.dimension()) {
            return Err(Error::SpecMismatch(format!(
                "bad form index {idx:?} for degree {}",
                self.degree
            )));
        }
        let Some((key, sign)) = sort_sign(idx) else {
            return Ok(());
        };
        let f = if sign < 0.0 { f.scale(-1.0) } else { f };
        let next = match self.components.remove(&key) {
            Some(prev) => prev.add(&f)?,
            None => f,
        };
        self.components.insert(key, next);
        Ok(())
    }

    /// Component with the permutation sign applied; `None` when zero.
    pub fn get(&self, idx: &[usize]) -> Option<ChartFn> {
        let (key, sign) = sort_sign(idx)?;
        self.components
            .get(&key)
            .map(|f| if sign < 0.0 { f.scale(-1.0) } else { f.clone() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (k, f) in &other.components {
            out.accumulate(k, f.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (k, f) in &other.components {
            out.accumulate(k, f.scale(-1.0))?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> Self {
        CoefficientForm {
            spec: self.spec.clone(),
            degree: self.degree,
            components: self
                .components
                .iter()
                .map(|(k, f)| (k.clone(), f.scale(c)))
                .collect(),
        }
    }

    /// `d` componentwise: `(dα)_{a I} = ∂_a α_I` antisymmetrized.
    pub fn exterior_derivative(&self, method: Derivative) -> Result<Self> {
        let mut out = CoefficientForm::zero(&self.spec, self.degree + 1);
        for (idx, f) in &self.components {
            for a in 0..self.dimension() {
                if idx.contains(&a) {
                    continue;
                }
                // leaf derivatives of basic coefficients vanish identically
                if self.spec.is_leaf_axis(a) && f.field.is_basic() && f.slope[a] == 0.0 {
                    continue;
                }
                let mut full = vec![a];
                full.extend_from_slice(idx);
                out.accumulate(&full, f.derivative(a, method)?)?;
            }
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        let mut out = CoefficientForm::zero(&self.spec, self.degree + other.degree);
        for (i, f) in &self.components {
            for (j, g) in &other.components {
                if i.iter().any(|a| j.contains(a)) {
                    continue;
                }
                let mut idx = i.clone();
                idx.extend_from_slice(j);
                out.accumulate(&idx, f.mul(g)?)?;
            }
        }
        Ok(out)
    }

    /// Largest coefficient magnitude over components and grid points.
    pub fn sup_norm(&self) -> f64 {
        self.components
            .values()
            .map(ChartFn::sup_norm)
            .fold(0.0, f64::max)
    }

    pub fn is_basic(&self) -> bool {
        self.components.values().all(ChartFn::is_basic)
    }

    /// Contraction of a 1-form with a vector field given by chart functions.
    pub fn pair(&self, vector: &[Option<ChartFn>]) -> Result<ChartFn> {
        if self.degree != 1 {
            return Err(Error::SpecMismatch("pairing needs a 1-form".into()));
        }
        let mut acc = ChartFn::constant(&self.spec, 0.0);
        for (idx, f) in &self.components {
            if let Some(v) = &vector[idx[0]] {
                acc = acc.add(&f.mul(v)?)?;
            }
        }
        Ok(acc)
    }
}
