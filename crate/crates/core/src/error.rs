use thiserror::Error;

/// Failures of the dense linear-algebra layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("matrix is not square: {rows} rows, {cols} columns")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("QR iteration did not converge after {iterations} iterations (window {lo}..={hi})")]
    NonConvergence { iterations: usize, lo: usize, hi: usize },
    #[error("eigen residual {residual:e} exceeds tolerance {tol:e}")]
    ResidualTooLarge { residual: f64, tol: f64 },
    #[error("eigenvalues within pairing tolerance; clusters {clusters:?}")]
    DegeneratePairing { clusters: Vec<Vec<usize>> },
    #[error("empty interval [{a}, {b})")]
    EmptyInterval { a: f64, b: f64 },
}

/// Failures of the model layers (Hatano-Nelson chain, quantum walk, transfer matrices).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("gauge factor exp({exponent}) overflows double precision")]
    Overflow { exponent: f64 },
    #[error("amplitude {max_amplitude:e} exceeded the overflow guard at step {step}")]
    AmplitudeOverflow { step: usize, max_amplitude: f64 },
    #[error("profile has no exponential decay to fit (max/min ratio {ratio})")]
    FlatProfile { ratio: f64 },
    #[error("no eigenvalue with |Im E| > {eps:e}")]
    NoComplexArc { eps: f64 },
    #[error("nonzero amplitude would leave the open chain at site {site}")]
    OpenBoundaryLeak { site: usize },
    #[error("eigenvalue {index} has modulus below 1e-300; phase undefined")]
    ZeroEigenvalue { index: usize },
    #[error("coin with cos(theta_mix) = {cos_theta:e} has no transfer matrix")]
    SingularCoin { cos_theta: f64 },
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
