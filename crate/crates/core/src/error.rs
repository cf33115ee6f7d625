use thiserror::Error;

/// A dual point that lies outside the range `J(M)` of a momentum map.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{realization}: point {point:?} is outside the momentum-map range: {constraint}")]
pub struct RangeError {
    pub realization: String,
    pub constraint: String,
    pub point: Vec<f64>,
}

impl RangeError {
    pub fn new(realization: &str, constraint: impl Into<String>, point: &[f64]) -> Self {
        Self {
            realization: realization.to_owned(),
            constraint: constraint.into(),
            point: point.to_vec(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Range(#[from] RangeError),
    #[error(transparent)]
    Integration(#[from] Box<crate::integrators::IntegrationFailure>),
    #[error("reference solution failed: {0}")]
    Oracle(String),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
