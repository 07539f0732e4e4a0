use thiserror::Error;

/// Errors raised by estimators, transforms, generators and I/O.
#[derive(Error, Debug)]
pub enum Error {
    #[error("column {0} is constant (zero sample variance)")]
    ConstantColumn(usize),

    #[error("sample is degenerate (zero variance)")]
    DegenerateSample,

    #[error("response has too few distinct values to form {0} non-empty slices")]
    DegenerateResponse(usize),

    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },

    #[error("predictor covariance is numerically singular (condition number above {0:.1e})")]
    SingularCovariance(f64),

    #[error("all eigenvalues are zero; dimension criterion undefined")]
    AllZeroSpectrum,

    #[error("basis dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("basis matrix is rank deficient (smallest scaled singular value {0:.3e})")]
    RankDeficientBasis(f64),

    #[error("local linear fit at observation {0} is singular even after ridge fallback")]
    SingularLocalFit(usize),

    #[error("normal equations for the subspace update are singular")]
    SingularNormalEquations,

    #[error("penalized curvature matrix for predictor {0} is singular")]
    PenaltySingular(usize),

    #[error("unknown scenario `{0}`; valid: {1}")]
    UnknownScenario(String, String),

    #[error("scenario parameter out of range: {0}")]
    InvalidScenarioParameter(String),

    #[error("probability {0} outside (0, 1)")]
    OutOfRange(f64),

    #[error("cannot parse `{value}` as a number at row {row}, column {column}")]
    NonNumericCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("{0}")]
    ParseError(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("missing artifacts: {0}")]
    MissingArtifacts(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}
