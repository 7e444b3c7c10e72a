//! Error types shared across the simulation pipeline.

use thiserror::Error;

/// Rejected configuration. Carries the offending field so callers (and CLI
/// users) can see exactly which knob to fix.
#[derive(Debug, Clone, Error)]
#[error("invalid config: {field}: {message}")]
pub struct ConfigError {
    /// Dotted path of the rejected field, e.g. `medium.t2_us`.
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

/// Failure during time propagation.
#[derive(Debug, Clone, Error)]
pub enum PropagationError {
    /// The integrator produced a non-finite value. Reported with the step and
    /// spatial cell where it was first seen so blow-ups can be localized.
    #[error("non-finite field state at step {step} (t = {t_us} us), cell {cell}: integration aborted")]
    NonFinite { step: usize, t_us: f64, cell: usize },
}

/// Anything a full propagation run can fail with.
#[derive(Debug, Clone, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Propagation(#[from] PropagationError),
}

/// Failure while measuring things on recorded traces.
#[derive(Debug, Clone, Error)]
pub enum DetectionError {
    #[error("no pulse found above threshold in window [{t0_us}, {t1_us}] us")]
    NoPulse { t0_us: f64, t1_us: f64 },
    /// The requested probe/window does not lie inside the recorded trace or
    /// detuning grid.
    #[error("{0}")]
    Domain(String),
}

/// Failure at one point of a parameter sweep, tagged with its coordinates so
/// a long batch names the offending run. The underlying cause is kept intact
/// for callers that branch on it (config mistake vs numerical abort).
#[derive(Debug, Error)]
#[error("sweep point {index} (density {density})")]
pub struct SweepError {
    pub index: usize,
    pub density: f64,
    #[source]
    pub source: Box<dyn std::error::Error + Send + Sync>,
}

/// Failure in a least-squares decay fit.
#[derive(Debug, Clone, Error)]
pub enum FitError {
    #[error("need at least {needed} usable points for the fit, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("degenerate fit: {0}")]
    Degenerate(String),
}
