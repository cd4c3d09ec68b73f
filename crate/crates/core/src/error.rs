use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "no root of apoptosis(R) - {target} on the bracket; scanned apoptosis range [{min}, {max}]"
    )]
    NoRoot { target: f64, min: f64, max: f64 },

    #[error("degenerate denominator for mode l = {l}: L1 = {l1:e}, L2 = {l2:e}")]
    DegenerateDenominator { l: u32, l1: f64, l2: f64 },

    #[error("assumption sigma_s(R) - A > 0 violated (margin = {margin:e})")]
    AssumptionViolated { margin: f64 },

    #[error("inconclusive resolution: {0}")]
    InconclusiveResolution(String),

    #[error("misuse: {0}")]
    Misuse(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
