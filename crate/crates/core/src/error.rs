use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} is outside its domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParams { field: &'static str, reason: String },

    /// The density matrix is (numerically) maximally mixed, so the
    /// eigenframe and hence the geometric phase are undefined.
    #[error("degenerate spectrum at tau_bar = {tau_bar} (eigenvalue gap {gap:e})")]
    Degenerate { tau_bar: f64, gap: f64 },

    #[error("quadrature did not converge: error estimate {estimate:e} > tolerance {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("positivity violated at tau_bar = {tau_bar}: excess {excess:e} (step too large?)")]
    Positivity { tau_bar: f64, excess: f64 },

    #[error("trajectory undersampled between samples {index} and {next}: overlap {overlap}")]
    Undersampled {
        index: usize,
        next: usize,
        overlap: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
