use thiserror::Error;

pub type Result<T> = std::result::Result<T, GainError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GainError {
    /// An argument lies outside the domain of the operation.
    #[error("{what}: {detail}")]
    Domain { what: &'static str, detail: String },

    /// The residual did not have the (-, +) sign pattern at the bracket ends.
    /// The bracket is analytically guaranteed, so this is an internal failure.
    #[error(
        "bracket invariant violated on [{lo}, {hi}]: residuals ({r_lo:e}, {r_hi:e}), expected (-, +)"
    )]
    Bracket {
        lo: f64,
        hi: f64,
        r_lo: f64,
        r_hi: f64,
    },

    #[error(
        "no sign change found expanding the bracket for pi = {pi:e} after {iterations} doublings"
    )]
    BracketExpansion { pi: f64, iterations: u32 },

    #[error("solver stopped after {iterations} iterations with residual {residual:e} (tolerance {tol:e})")]
    NotConverged {
        iterations: u32,
        residual: f64,
        tol: f64,
    },

    #[error("no interior maximum of F in [{from_db}, {to_db}] dB; widen the range")]
    NoInteriorPeak { from_db: f64, to_db: f64 },
}

pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> GainError {
    GainError::Domain {
        what,
        detail: detail.into(),
    }
}
