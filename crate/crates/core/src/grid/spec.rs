use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Discretization of one periodic foliated chart.
///
/// Axis order is `(x¹, y¹, …, xⁿ, yⁿ, x, y)`: the `2n` transverse real axes
/// followed by the two optional leaf axes. Storage is row-major with the last
/// present axis varying fastest. Grid points sit at `i·L/N`, so every axis
/// contains the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub transverse_resolution: Vec<usize>,
    pub transverse_periods: Vec<f64>,
    #[serde(default)]
    pub leaf_resolution: Option<[usize; 2]>,
    #[serde(default)]
    pub leaf_periods: Option<[f64; 2]>,
}

impl GridSpec {
    pub fn new(
        n: usize,
        transverse_resolution: Vec<usize>,
        transverse_periods: Vec<f64>,
        leaf_resolution: Option<[usize; 2]>,
        leaf_periods: Option<[f64; 2]>,
    ) -> Result<Self> {
        let spec = GridSpec {
            n,
            transverse_resolution,
            transverse_periods,
            leaf_resolution,
            leaf_periods,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Basic-only chart with the same resolution and period on every transverse axis.
    pub fn uniform(n: usize, resolution: usize, period: f64) -> Result<Self> {
        Self::new(n, vec![resolution; 2 * n], vec![period; 2 * n], None, None)
    }

    /// Adds (or replaces) square leaf axes.
    pub fn with_leaf(mut self, resolution: usize, period: f64) -> Result<Self> {
        self.leaf_resolution = Some([resolution; 2]);
        self.leaf_periods = Some([period; 2]);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidGrid("n must be at least 1".into()));
        }
        if self.transverse_resolution.len() != 2 * self.n
            || self.transverse_periods.len() != 2 * self.n
        {
            return Err(Error::InvalidGrid(format!(
                "expected {} transverse resolutions and periods, got {} and {}",
                2 * self.n,
                self.transverse_resolution.len(),
                self.transverse_periods.len()
            )));
        }
        if self.leaf_resolution.is_some() != self.leaf_periods.is_some() {
            return Err(Error::InvalidGrid(
                "leaf resolution and leaf periods must be given together".into(),
            ));
        }
        let leaf_res = self.leaf_resolution.iter().flatten();
        for &r in self.transverse_resolution.iter().chain(leaf_res) {
            if r < 8 || r % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "resolution {r} must be even and at least 8"
                )));
            }
        }
        let leaf_per = self.leaf_periods.iter().flatten();
        for &p in self.transverse_periods.iter().chain(leaf_per) {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::InvalidGrid(format!("period {p} must be positive")));
            }
        }
        Ok(())
    }

    pub fn is_full(&self) -> bool {
        self.leaf_resolution.is_some()
    }

    /// Drops the leaf axes.
    pub fn basic_only(&self) -> GridSpec {
        GridSpec {
            leaf_resolution: None,
            leaf_periods: None,
            ..self.clone()
        }
    }

    pub fn x_axis(&self, j: usize) -> usize {
        2 * j
    }

    pub fn y_axis(&self, j: usize) -> usize {
        2 * j + 1
    }

    pub fn leaf_x_axis(&self) -> usize {
        2 * self.n
    }

    pub fn leaf_y_axis(&self) -> usize {
        2 * self.n + 1
    }

    pub fn is_leaf_axis(&self, axis: usize) -> bool {
        axis >= 2 * self.n
    }

    /// Number of axes stored by a field (`2n` for basic fields).
    pub fn axis_count(&self, basic: bool) -> usize {
        if basic || !self.is_full() {
            2 * self.n
        } else {
            2 * self.n + 2
        }
    }

    pub fn resolution(&self, axis: usize) -> usize {
        if axis < 2 * self.n {
            self.transverse_resolution[axis]
        } else {
            self.leaf_resolution.expect("leaf axis on basic-only spec")[axis - 2 * self.n]
        }
    }

    pub fn period(&self, axis: usize) -> f64 {
        if axis < 2 * self.n {
            self.transverse_periods[axis]
        } else {
            self.leaf_periods.expect("leaf axis on basic-only spec")[axis - 2 * self.n]
        }
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.period(axis) / self.resolution(axis) as f64
    }

    pub fn shape(&self, basic: bool) -> Vec<usize> {
        (0..self.axis_count(basic))
            .map(|a| self.resolution(a))
            .collect()
    }

    pub fn transverse_len(&self) -> usize {
        self.transverse_resolution.iter().product()
    }

    pub fn leaf_len(&self) -> usize {
        self.leaf_resolution.map_or(1, |[a, b]| a * b)
    }

    pub fn len(&self, basic: bool) -> usize {
        if basic {
            self.transverse_len()
        } else {
            self.transverse_len() * self.leaf_len()
        }
    }

    /// Row-major stride of `axis` in a field with the given basic flag.
    pub fn stride(&self, axis: usize, basic: bool) -> usize {
        ((axis + 1)..self.axis_count(basic))
            .map(|a| self.resolution(a))
            .product()
    }

    pub fn min_transverse_spacing(&self) -> f64 {
        (0..2 * self.n)
            .map(|a| self.spacing(a))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_leaf_spacing(&self) -> Option<f64> {
        self.is_full().then(|| {
            self.spacing(self.leaf_x_axis())
                .min(self.spacing(self.leaf_y_axis()))
        })
    }

    /// Volume of one cell over the stored axes.
    pub fn cell_volume(&self, basic: bool) -> f64 {
        (0..self.axis_count(basic))
            .map(|a| self.spacing(a))
            .product()
    }

    /// Coordinates of the flat point index `p`, written into `out`.
    pub fn coords_into(&self, mut p: usize, basic: bool, out: &mut [f64]) {
        let k = self.axis_count(basic);
        for a in (0..k).rev() {
            let r = self.resolution(a);
            out[a] = (p % r) as f64 * self.spacing(a);
            p /= r;
        }
    }

    pub fn coords(&self, p: usize, basic: bool) -> Vec<f64> {
        let mut out = vec![0.0; self.axis_count(basic)];
        self.coords_into(p, basic, &mut out);
        out
    }
}
