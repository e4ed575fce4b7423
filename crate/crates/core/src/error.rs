use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("depth {depth} outside supported range {min}..={max}")]
    DepthOutOfRange { depth: usize, min: usize, max: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("coupling point lies on a region boundary: {0}")]
    OnBoundary(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_depth(depth: usize, min: usize, max: usize) -> Result<()> {
    if depth < min || depth > max {
        return Err(Error::DepthOutOfRange { depth, min, max });
    }
    Ok(())
}

pub(crate) fn check_finite(what: &str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Numerical(format!("{what} is not finite ({value})")))
    }
}
