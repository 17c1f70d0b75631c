use thiserror::Error;

/// Errors produced by kernel evaluation, spectral decomposition, coefficient
/// extraction, and the regression pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cosine {0} lies outside [-1, 1] beyond the 1e-12 clamp band")]
    CosineOutOfRange(f64),

    #[error("zero-norm input vector (row {0}); kernel is undefined at the origin")]
    ZeroNormInput(usize),

    #[error("parameter {name} = {value} violates {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("ambient dimension {0} is too small (need {1})")]
    DimensionTooSmall(usize, usize),

    #[error("quad_order {quad_order} too small for k_max {k_max} (need at least 4*k_max)")]
    QuadratureTooCoarse { quad_order: usize, k_max: usize },

    #[error("Gauss-Jacobi node solve failed to converge at degree {degree}")]
    QuadratureDiverged { degree: usize },

    #[error("eigenvalue {value:.3e} at frequency {k} is negative beyond the PSD tolerance {tol:.3e}; increase quad_order")]
    NegativeEigenvalue { k: usize, value: f64, tol: f64 },

    #[error("only {found} positive {parity} eigenvalues in the requested range; need at least {needed}")]
    InsufficientEigenvalues {
        parity: &'static str,
        needed: usize,
        found: usize,
    },

    #[error("fit matrix condition number {cond:.3e} exceeds 1e12; widen the t grid")]
    IllConditionedFit { cond: f64 },

    #[error("fit R^2 = {r_squared:.6} below 0.98: power-law regime not established")]
    LowFitQuality { r_squared: f64 },

    #[error("outside the regime of validity: {0}")]
    RegimeViolation(String),

    #[error("non-numeric feature cell at data row {row}, column {column}: {value:?}")]
    NonNumericCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("non-finite feature cell at data row {row}, column {column}")]
    NonFiniteCell { row: usize, column: String },

    #[error("degenerate label set: dataset contains a single class")]
    DegenerateLabels,

    #[error("dataset has {0} rows; need at least 2")]
    TooFewRows(usize),

    #[error("label column {0:?} not found in header")]
    MissingLabelColumn(String),

    #[error("label column index {index} out of range for {width} columns")]
    LabelIndexOutOfRange { index: usize, width: usize },

    #[error("row {0} has zero norm; unit_norm normalization is undefined")]
    ZeroNormRow(usize),

    #[error("system is numerically singular (condition estimate {cond:.3e}); add ridge jitter")]
    SingularSystem { cond: f64 },

    #[error("solve produced non-finite coefficients")]
    NonFiniteSolve,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
