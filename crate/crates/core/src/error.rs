//! Error types shared across the solver.

use thiserror::Error;

#[derive(Error, Debug, Clone)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("chord-arc ratio {min_ratio:.3e} below threshold {threshold:.3e}; curve too close to self-intersection")]
    ChordArcViolation { min_ratio: f64, threshold: f64 },

    #[error("fixed-point solve did not converge: {iterations} iterations, last update {residual:.3e}")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("amplitude {0} outside supported range [0, {1}]")]
    AmplitudeOutOfRange(f64, f64),

    #[error("Newton solve diverged: residual {residual:.3e} after {iterations} iterations")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("incompatible periods: {0}")]
    IncompatiblePeriod(String),

    #[error("no unstable mode: growth rate is zero for period factor {q}")]
    NoUnstableMode { q: f64 },

    #[error("seed violates the carrier orthogonality condition: |inner product| = {0:.3e}")]
    OrthogonalityViolated(f64),

    #[error("blow-up guard tripped at t = {t}: {reason}")]
    BlowupDetected { t: f64, reason: String },

    #[error("non-monotone parametrization: min d(Re zeta)/d alpha = {0:.3e}")]
    NonMonotoneParametrization(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
