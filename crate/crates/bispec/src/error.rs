use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("spherical Bessel overflow for argument with |Im z| = {im_abs}: value not representable")]
    BesselOverflow { im_abs: f64 },

    #[error("Gauss-Legendre root {index} failed to converge")]
    QuadratureNonConvergence { index: usize },

    #[error("plane-wave expansion truncated too early: tail {tail:.3e} vs max coefficient {max_coeff:.3e}")]
    TruncationInsufficient { tail: f64, max_coeff: f64 },

    #[error("eigensolver failed to converge on row {row} after {iters} iterations")]
    EigNonConvergence { row: usize, iters: usize },

    #[error("channel l={l} solve failed: {source}")]
    ChannelSolve {
        l: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("lambda = {lambda} is too close to eigenvalue {nearest} (distance {dist:.3e})")]
    PoleProximity { lambda: String, nearest: f64, dist: f64 },

    #[error("boundary-data matrix is singular: lambda is a Navier eigenvalue of the channel")]
    SingularBoundaryMatrix,

    #[error("lambda on the branch cut (-inf, 0]")]
    BranchCut,

    #[error("datasets incompatible: {0}")]
    IncompatibleDatasets(String),

    #[error("truncation window undefined: Re lambda = {re_lambda} <= cGap * lambda_(E+1) = {bound}")]
    WindowUndefined { re_lambda: f64, bound: f64 },

    #[error("grouping calibration failed: residual(both) = {both:.3e}, residual(first-only) = {first_only:.3e}")]
    CalibrationFailed { both: f64, first_only: f64 },

    #[error("config validation: {0}")]
    ConfigValidation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("config parse: {0}")]
    ConfigParse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
