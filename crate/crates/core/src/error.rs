use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("root not bracketed on [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },

    /// No flow branch reproduces the requested bound-state count at this cutoff.
    #[error("cutoff R = {r} is below the minimal admissible cutoff R_min = {r_min} for {target} bound state(s)")]
    RMinViolation { r: f64, r_min: f64, target: u32 },

    #[error("integration step underflow at r = {r}")]
    StepUnderflow { r: f64 },

    #[error("quadrature did not reach tolerance {tol:e} (estimated error {err:e})")]
    QuadratureFailure { tol: f64, err: f64 },

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("exactly one short-range input must be given, got {0}")]
    Ambiguous(usize),

    #[error("phase grid too coarse to unwrap between k = {k_lo} and k = {k_hi}")]
    CoarseGrid { k_lo: f64, k_hi: f64 },
}

impl Error {
    /// True for errors that signal invalid physical input rather than a
    /// numerical breakdown.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::RMinViolation { .. } | Error::Pole(_) | Error::Ambiguous(_)
        )
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
