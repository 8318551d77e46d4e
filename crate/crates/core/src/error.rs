use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid system parameter: {0}")]
    InvalidParameter(String),

    #[error("density is unbounded at the origin for alpha = mu = 1")]
    UnboundedAtOrigin,

    #[error("moment order {0} is not supported (expected 1 or 2)")]
    UnsupportedOrder(u32),

    #[error("log-gamma pole at {0}")]
    Pole(f64),

    #[error("contour placement failed: {0}")]
    ContourFailure(String),

    #[error("no convergence: {what} (last estimates {previous:e}, {last:e})")]
    NonConvergence {
        what: &'static str,
        previous: f64,
        last: f64,
    },

    #[error(
        "high-SNR approximation requires alpha*mu > 2*nu (alpha*mu = {alpha_mu}, 2*nu = {two_nu})"
    )]
    ValidityViolation { alpha_mu: f64, two_nu: f64 },

    #[error("degenerate low-SNR quantity: {0}")]
    Degenerate(&'static str),

    #[error("empty power-allocation grid")]
    EmptyGrid,
}

pub type Result<T> = std::result::Result<T, Error>;
