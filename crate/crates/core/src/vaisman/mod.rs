//! Vaisman structure tensors on a foliated chart with coordinates
//! `(z¹, …, zⁿ, x + iy)`, where `U = ∂/∂x` is the Lee field and `V = ∂/∂y = JU`.

mod chart;
mod form;

pub use chart::{
    adapted_frame, complex_structure, fundamental_form, lee_forms, metric_tensor, verify_vaisman,
    AdaptedFrame, ComplexStructure, InvariantReport, MetricTensor, Potential, VaismanChart,
    VaismanResiduals, IDENTITY_TOLERANCE,
};
pub use form::{ChartFn, CoefficientForm, Derivative};
