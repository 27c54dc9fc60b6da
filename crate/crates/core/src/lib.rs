//! Transverse Kähler–Ricci flow on periodic foliated charts of Vaisman
//! manifolds, with the structure identities used to validate it.

// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod grid;

pub use error::{Error, Result};
pub use grid::{ComplexField, GridSpec, RealField, ScalarField};
pub mod hermitian;
pub mod transverse;

pub use transverse::HermitianField;
pub mod flow;
pub mod snapshot;
pub use snapshot::Snapshot;
pub mod vaisman;
pub use vaisman::{CoefficientForm, VaismanChart};
pub mod einstein;
pub use einstein::{BlockRicci, EinsteinFit, FitReport};
