use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use super::GridSpec;
use crate::error::{Error, Result};

/// Scalar types a field can hold.
pub trait FieldValue:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
{
    const ZERO: Self;
    fn from_real(x: f64) -> Self;
    fn to_complex(self) -> Complex64;
    fn modulus(self) -> f64;
    fn conj(self) -> Self;
}

impl FieldValue for f64 {
    const ZERO: Self = 0.0;
    fn from_real(x: f64) -> Self {
        x
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn conj(self) -> Self {
        self
    }
}

impl FieldValue for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn to_complex(self) -> Complex64 {
        self
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
}

/// A sampled function on a chart.
///
/// Basic fields store only the transverse axes; reading them at a full-grid
/// point ignores the leaf coordinates, so they are leaf-constant by layout.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField<T> {
    spec: Arc<GridSpec>,
    basic: bool,
    values: Vec<T>,
}

pub type RealField = ScalarField<f64>;
pub type ComplexField = ScalarField<Complex64>;

impl<T: FieldValue> ScalarField<T> {
    pub fn from_values(spec: Arc<GridSpec>, basic: bool, values: Vec<T>) -> Result<Self> {
        if !basic && !spec.is_full() {
            return Err(Error::SpecMismatch(
                "a full field needs a spec with leaf axes".into(),
            ));
        }
        let expected = spec.len(basic);
        if values.len() != expected {
            return Err(Error::SpecMismatch(format!(
                "expected {expected} values, got {}",
                values.len()
            )));
        }
        Ok(ScalarField {
            spec,
            basic,
            values,
        })
    }

    /// Samples `f` at every grid point; `f` receives the coordinates of the stored axes.
    pub fn from_fn(spec: &Arc<GridSpec>, basic: bool, mut f: impl FnMut(&[f64]) -> T) -> Self {
        let basic = basic || !spec.is_full();
        let len = spec.len(basic);
        let mut c = vec![0.0; spec.axis_count(basic)];
        let values = (0..len)
            .map(|p| {
                spec.coords_into(p, basic, &mut c);
                f(&c)
            })
            .collect();
        ScalarField {
            spec: spec.clone(),
            basic,
            values,
        }
    }

    pub fn constant(spec: &Arc<GridSpec>, basic: bool, value: T) -> Self {
        let basic = basic || !spec.is_full();
        ScalarField {
            spec: spec.clone(),
            basic,
            values: vec![value; spec.len(basic)],
        }
    }

    pub fn zeros(spec: &Arc<GridSpec>, basic: bool) -> Self {
        Self::constant(spec, basic, T::ZERO)
    }

    pub fn spec(&self) -> &Arc<GridSpec> {
        &self.spec
    }

    pub fn is_basic(&self) -> bool {
        self.basic
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at a full-grid point index (or a transverse index for basic-only specs).
    pub fn value_at_full(&self, p: usize) -> T {
        if self.basic && self.spec.is_full() {
            self.values[p / self.spec.leaf_len()]
        } else {
            self.values[p]
        }
    }

    /// Broadcasts a basic field onto the leaf axes. Full fields are returned unchanged.
    pub fn to_full(&self) -> Self {
        if !self.basic || !self.spec.is_full() {
            return self.clone();
        }
        let ll = self.spec.leaf_len();
        let mut values = Vec::with_capacity(self.values.len() * ll);
        for &v in &self.values {
            values.extend(std::iter::repeat_n(v, ll));
        }
        ScalarField {
            spec: self.spec.clone(),
            basic: false,
            values,
        }
    }

    pub fn map<U: FieldValue>(&self, f: impl Fn(T) -> U) -> ScalarField<U> {
        ScalarField {
            spec: self.spec.clone(),
            basic: self.basic,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination; a basic operand is broadcast when the other is full.
    pub fn zip_with<U: FieldValue, V: FieldValue>(
        &self,
        other: &ScalarField<U>,
        f: impl Fn(T, U) -> V,
    ) -> Result<ScalarField<V>> {
        if *self.spec != *other.spec {
            return Err(Error::SpecMismatch(
                "operands live on different grids".into(),
            ));
        }
        let values = match (self.basic, other.basic) {
            (a, b) if a == b => self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&x, &y)| f(x, y))
                .collect(),
            (true, false) => {
                let ll = self.spec.leaf_len();
                let mut out = Vec::with_capacity(other.len());
                for (&x, ys) in self.values.iter().zip(other.values.chunks(ll)) {
                    out.extend(ys.iter().map(|&y| f(x, y)));
                }
                out
            }
            _ => {
                let ll = self.spec.leaf_len();
                let mut out = Vec::with_capacity(self.len());
                for (xs, &y) in self.values.chunks(ll).zip(&other.values) {
                    out.extend(xs.iter().map(|&x| f(x, y)));
                }
                out
            }
        };
        Ok(ScalarField {
            spec: self.spec.clone(),
            basic: self.basic && other.basic,
            values,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    pub fn shift(&self, c: T) -> Self {
        self.map(|v| v + c)
    }

    pub fn conj(&self) -> Self {
        self.map(FieldValue::conj)
    }

    pub fn to_complex(&self) -> ComplexField {
        self.map(FieldValue::to_complex)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.modulus()))
    }

    pub(crate) fn with_values<U: FieldValue>(&self, values: Vec<U>) -> ScalarField<U> {
        debug_assert_eq!(values.len(), self.values.len());
        ScalarField {
            spec: self.spec.clone(),
            basic: self.basic,
            values,
        }
    }
}

impl ComplexField {
    pub fn re(&self) -> RealField {
        self.map(|v| v.re)
    }

    pub fn im(&self) -> RealField {
        self.map(|v| v.im)
    }
}

impl RealField {
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_spec() -> Arc<GridSpec> {
        Arc::new(
            GridSpec::uniform(1, 8, 1.0)
                .unwrap()
                .with_leaf(8, 2.0)
                .unwrap(),
        )
    }

    #[test]
    fn basic_field_is_leaf_constant() {
        let spec = full_spec();
        let f = RealField::from_fn(&spec, true, |c| c[0] + 10.0 * c[1]);
        assert_eq!(f.len(), 64);
        let full = f.to_full();
        assert_eq!(full.len(), 64 * 64);
        for p in 0..full.len() {
            assert_eq!(full.values()[p], f.values()[p / 64]);
            assert_eq!(f.value_at_full(p), full.values()[p]);
        }
    }

    #[test]
    fn zip_broadcasts_basic_operand() {
        let spec = full_spec();
        let b = RealField::from_fn(&spec, true, |c| c[0]);
        let f = RealField::from_fn(&spec, false, |c| c[2]);
        let s = b.add(&f).unwrap();
        assert!(!s.is_basic());
        let expect = RealField::from_fn(&spec, false, |c| c[0] + c[2]);
        assert_eq!(s, expect);
        assert_eq!(f.add(&b).unwrap(), expect);
    }

    #[test]
    fn length_is_checked() {
        let spec = full_spec();
        assert!(RealField::from_values(spec.clone(), true, vec![0.0; 3]).is_err());
        let basic_only = Arc::new(spec.basic_only());
        assert!(RealField::from_values(basic_only, false, vec![0.0; 64]).is_err());
    }
}
