use thiserror::Error;

/// Every failure the library can report. `is_config` splits the CLI exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    Dimension(String),
    #[error("site index {0} out of range")]
    SiteOutOfRange(usize),
    #[error("operator is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("channel is not trace preserving (deviation {0:.3e})")]
    Incomplete(f64),
    #[error("operator is not hermitian")]
    NotHermitian,
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("codespace weight {0:.3e} too small for projection")]
    NegligibleCodespace(f64),
    #[error("branch probability underflow after cycle {0}")]
    Underflow(usize),
    #[error("rank deficient system: {0}")]
    RankDeficient(String),
    #[error("optimizer did not converge after {iters} iterations (residual {residual:.3e})")]
    NoConvergence { iters: usize, residual: f64 },
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for problems in user input rather than in the numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Dimension(_)
                | Error::SiteOutOfRange(_)
                | Error::Param(_)
                | Error::Io(_)
                | Error::Json(_)
                | Error::Csv(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
