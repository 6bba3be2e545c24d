use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(&'static str),
    /// Inconsistent sizes or labels between objects that must agree.
    #[error("shape mismatch: {0}")]
    Shape(&'static str),
    /// A fidelity target outside the reachable interval.
    #[error("target {target} outside feasible range [{lo}, {hi}]")]
    Infeasible { target: f64, lo: f64, hi: f64 },
    /// An optical state exceeded the per-mode photon cutoff.
    #[error("photon number {count} exceeds mode cutoff {cutoff}")]
    Cutoff { count: u32, cutoff: u8 },
    /// A weight vector or amplitude set that should be normalised is not.
    #[error("not normalised: {0}")]
    Normalisation(&'static str),
    #[error("parse error: {0}")]
    Parse(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
