use thiserror::Error;

/// Errors raised by the cycle toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scalar input is outside its domain.
    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// `<Q_h> = 0`, so no thermodynamic efficiency exists.
    #[error("efficiency undefined: mean heat absorbed from the hot bath is zero")]
    UndefinedEfficiency,

    /// `<W> = 0`, so the relative work fluctuation diverges.
    #[error("relative work fluctuation undefined: mean work is zero")]
    UndefinedRelativeFluctuation,

    /// The distribution carries undefined or divergent mass.
    #[error("moments undefined: distribution has undefined mass {undefined} and divergent mass {divergent}")]
    UndefinedMoments { undefined: f64, divergent: f64 },

    #[error("moment order must be at least 1")]
    InvalidMomentOrder,

    /// A scan specification failed validation; every offending field is listed.
    #[error("invalid scan specification: {}", .0.join("; "))]
    InvalidScanSpec(Vec<String>),

    #[error("unknown preset `{name}` (available: {})", .available.join(", "))]
    UnknownPreset { name: String, available: Vec<String> },

    #[error("unknown observable `{0}`")]
    UnknownObservable(String),

    /// The objective is undefined everywhere on the search interval.
    #[error("no extremum: objective `{0}` is undefined over the whole interval")]
    NoExtremum(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// True for quantities that are well-posed inputs but physically undefined outputs.
    pub fn is_undefined_quantity(&self) -> bool {
        matches!(
            self,
            Error::UndefinedEfficiency
                | Error::UndefinedRelativeFluctuation
                | Error::UndefinedMoments { .. }
                | Error::NoExtremum(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
