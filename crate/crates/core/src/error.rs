use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {func}: {msg}")]
    Domain { func: &'static str, msg: String },

    #[error("{func} did not converge after {terms} terms (last partial sum {partial:e}, last term {last_term:e})")]
    Convergence {
        func: &'static str,
        terms: usize,
        partial: f64,
        last_term: f64,
    },

    #[error("range error in {func}: {msg}")]
    Range { func: &'static str, msg: String },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("matrix of order {order} exceeds the oracle limit of {limit}")]
    Size { order: usize, limit: usize },

    #[error("no sign change of f - target on [{lo}, {hi}] (f(lo) - target = {flo:e}, f(hi) - target = {fhi:e})")]
    Bracket { lo: f64, hi: f64, flo: f64, fhi: f64 },

    #[error("quadrature failed: achieved error estimate {achieved:e} exceeds tolerance {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("invalid model: {0}")]
    Model(String),

    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Error {
    Error::Domain {
        func,
        msg: msg.into(),
    }
}

pub(crate) fn ensure_finite(func: &'static str, name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(domain(func, format!("{name} must be finite, got {v}")))
    }
}
