use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A caller broke a precondition (shapes, ranges, sets).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("non-finite value at index {index} while computing {what}")]
    NonFinite { what: &'static str, index: usize },

    #[error("numeric failure at lambda = {lambda}: {source}")]
    AtLambda {
        lambda: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("no grid value reaches coverage {target}: grid too low (largest lambda {lambda_max} covered in {coverage} of draws)")]
    GridTooLow {
        target: f64,
        lambda_max: f64,
        coverage: f64,
    },

    #[error("theory bound undefined: {0}")]
    UndefinedBound(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures caused by floating-point breakdown rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. } | Error::Calibration(_) | Error::AtLambda { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
