use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix is larger than the {max}x{max} eigensolver limit")]
    MatrixTooLarge { max: usize },

    #[error("Bloch vector is not a unit vector (|n| = {norm})")]
    NonUnitVector { norm: f64 },

    #[error("scenario mismatch: polynomial is ({poly_a},{poly_b}), family is ({fam_a},{fam_b})")]
    ScenarioMismatch {
        poly_a: usize,
        poly_b: usize,
        fam_a: usize,
        fam_b: usize,
    },

    #[error("scenario ({m_a},{n_b}) exceeds the enumeration cap of {cap} settings")]
    ScenarioTooLarge { m_a: usize, n_b: usize, cap: usize },

    #[error("setting index out of range: {0}")]
    InvalidIndex(String),

    #[error("malformed correlation table: {0}")]
    MalformedTable(String),

    #[error("zero vector cannot be normalized")]
    ZeroVector,

    #[error("seed terms {0} and {1} do not commute")]
    NonCommutingSeed(usize, usize),

    #[error("pairing scheme does not cover B-side axis {0}")]
    IncompletePairing(char),

    #[error("invalid pairing scheme: {0}")]
    InvalidScheme(String),

    #[error("forged polynomial does not reproduce the seed (max deviation {deviation:.3e})")]
    VerificationFailed { deviation: f64 },

    #[error("malformed interval [{lo}, {hi}]")]
    MalformedInterval { lo: f64, hi: f64 },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value in input")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, Error>;
