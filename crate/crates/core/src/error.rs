use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("axis {axis} is not present on a grid with {present} axes")]
    AxisOutOfRange { axis: usize, present: usize },

    #[error("complex index {index} out of range for transverse dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("derivative order {0} is not supported (expected 1 or 2)")]
    UnsupportedOrder(u32),

    #[error("field/spec mismatch: {0}")]
    SpecMismatch(String),

    #[error("field must be basic (leaf-constant): {0}")]
    NotBasic(&'static str),

    #[error("matrix is not Hermitian at point {point} (defect {defect:e})")]
    NotHermitian { point: usize, defect: f64 },

    #[error("positivity lost at point {point}: minimum eigenvalue {min_eig:e}")]
    PositivityLost { point: usize, min_eig: f64 },

    #[error("non-positive determinant at point {point}")]
    NonPositiveDeterminant { point: usize },

    #[error("singular matrix at point {point}")]
    SingularMatrix { point: usize },

    #[error("class is not i-ddbar-exact on this chart (residual {residual:e})")]
    InexactClass { residual: f64 },

    #[error("time step {dt:e} fell below the floor")]
    StepFloor { dt: f64 },

    #[error("identity violated: {identity} (residual {residual:e})")]
    IdentityViolation { identity: String, residual: f64 },

    #[error("scale must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("lambda = {lambda} gives a degenerate homothety (need lambda > -1/2)")]
    DegenerateScale { lambda: f64 },

    #[error("product of two non-constant affine coefficients is not representable")]
    NonAffineProduct,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
