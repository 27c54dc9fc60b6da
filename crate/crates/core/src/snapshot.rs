//! JSON snapshots of sampled fields: `{spec, basic, values}` with values flat
//! and row-major in the grid's axis order; complex values are `[re, im]` pairs
//! and Hermitian fields store one row-major `n×n` block per point.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec, RealField};
use crate::transverse::HermitianField;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SnapshotValues {
    Real(Vec<f64>),
    Complex(Vec<[f64; 2]>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub spec: GridSpec,
    pub basic: bool,
    pub values: SnapshotValues,
}

fn pairs(values: &[Complex64]) -> SnapshotValues {
    SnapshotValues::Complex(values.iter().map(|z| [z.re, z.im]).collect())
}

impl Snapshot {
    pub fn from_real(f: &RealField) -> Self {
        Snapshot {
            spec: (**f.spec()).clone(),
            basic: f.is_basic(),
            values: SnapshotValues::Real(f.values().to_vec()),
        }
    }

    pub fn from_complex(f: &ComplexField) -> Self {
        Snapshot {
            spec: (**f.spec()).clone(),
            basic: f.is_basic(),
            values: pairs(f.values()),
        }
    }

    pub fn from_hermitian(g: &HermitianField) -> Self {
        Snapshot {
            spec: (**g.spec()).clone(),
            basic: g.is_basic(),
            values: pairs(g.data()),
        }
    }

    fn checked_spec(&self) -> Result<Arc<GridSpec>> {
        self.spec
            .validate()
            .map_err(|e| Error::Snapshot(format!("spec: {e}")))?;
        Ok(Arc::new(self.spec.clone()))
    }

    fn complex_values(&self) -> Vec<Complex64> {
        match &self.values {
            SnapshotValues::Real(v) => v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            SnapshotValues::Complex(v) => v.iter().map(|p| Complex64::new(p[0], p[1])).collect(),
        }
    }

    pub fn to_real(&self) -> Result<RealField> {
        let SnapshotValues::Real(v) = &self.values else {
            return Err(Error::Snapshot("expected real values".into()));
        };
        RealField::from_values(self.checked_spec()?, self.basic, v.clone())
            .map_err(|e| Error::Snapshot(e.to_string()))
    }

    pub fn to_complex(&self) -> Result<ComplexField> {
        ComplexField::from_values(self.checked_spec()?, self.basic, self.complex_values())
            .map_err(|e| Error::Snapshot(e.to_string()))
    }

    pub fn to_hermitian(&self) -> Result<HermitianField> {
        HermitianField::from_data(self.checked_spec()?, self.basic, self.complex_values())
            .map_err(|e| Error::Snapshot(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Snapshot(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Snapshot::from_json(&fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn round_trips_are_bitwise() {
        let s = Arc::new(
            GridSpec::uniform(1, 8, 2.0 * PI)
                .unwrap()
                .with_leaf(8, 1.0)
                .unwrap(),
        );
        let f = RealField::from_fn(&s, false, |c| (c[0] * 1.1).sin() + c[2] / 3.0);
        let back = Snapshot::from_json(&Snapshot::from_real(&f).to_json().unwrap())
            .unwrap()
            .to_real()
            .unwrap();
        assert_eq!(back, f);

        let g = HermitianField::from_fn(&s, true, |c, m| {
            m[0] = Complex64::new(1.0 + 0.1 * c[1].cos(), 0.0)
        })
        .unwrap();
        let text = Snapshot::from_hermitian(&g).to_json().unwrap();
        assert!(text.contains("\"basic\":true"));
        assert_eq!(
            Snapshot::from_json(&text).unwrap().to_hermitian().unwrap(),
            g
        );
    }

    #[test]
    fn malformed_input_is_rejected() {
        assert!(matches!(
            Snapshot::from_json("{\"spec\": 3}"),
            Err(Error::Snapshot(_))
        ));
        let s = Arc::new(GridSpec::uniform(1, 8, 1.0).unwrap());
        let mut snap = Snapshot::from_real(&RealField::zeros(&s, true));
        snap.values = SnapshotValues::Real(vec![0.0; 3]);
        assert!(snap.to_real().is_err());
    }
}
