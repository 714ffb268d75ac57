use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coupling J_{index} = {value} is not strictly positive")]
    NonPositiveCoupling { index: usize, value: f64 },

    #[error("chain needs at least 2 sites, got {0}")]
    TooFewSites(usize),

    #[error("length mismatch: {what} has {found} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("chain is not mirror symmetric: {what} at index {index} deviates by {deviation:e}")]
    NotMirrorSymmetric {
        what: &'static str,
        index: usize,
        deviation: f64,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("tridiagonal eigensolver did not converge for eigenvalue {index} after {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },

    #[error("energies are not strictly ascending at index {index}")]
    NotAscending { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("level ordering cannot be repaired at amplitude {amplitude}; use a larger amplitude")]
    MonotonicityUnrecoverable { amplitude: f64 },

    #[error("target energies {index} and {} are nearly degenerate (gap {gap:e})", index + 1)]
    NearDegenerate { index: usize, gap: f64 },

    #[error("reconstructed chain is numerically asymmetric (relative asymmetry {asymmetry:e})")]
    AsymmetricReconstruction { asymmetry: f64 },

    #[error("internal numerical error: {0}")]
    Internal(String),

    #[error("site {site} is out of range for a chain of {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("Pfaffian requires an even dimension, got {0}")]
    OddDimension(usize),

    #[error("matrix is not antisymmetric (deviation {deviation:e})")]
    NotAntisymmetric { deviation: f64 },

    #[error("Pfaffian self-check failed: |Pf^2 - det| = {mismatch:e}, |det| = {det:e}")]
    PfaffianCheck { mismatch: f64, det: f64 },

    #[error("exact diagonalization limited to {max} sites, got {n_sites}")]
    TooLarge { n_sites: usize, max: usize },

    #[error("time grid has no pairs separated by the period {period}")]
    NoPeriodPairs { period: f64 },

    #[error("malformed correlation file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
