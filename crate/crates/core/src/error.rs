use thiserror::Error;

use crate::ideal::Ideal;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid ring: {0}")]
    InvalidRing(String),

    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    #[error("norm of zero ideal undefined")]
    ZeroIdealNorm,

    #[error("quotient does not exist as stated: generator is not in the ideal")]
    QuotientUndefined,

    #[error("residue enumeration too large: {count} residues exceeds cap {cap}")]
    ResidueCap { count: String, cap: u64 },

    /// The exhaustive scan was abandoned. `partial` is generated by values of
    /// the polynomial, so it is contained in the true fixed divisor.
    #[error("fixed divisor scan exceeds cap ({count} candidates, cap {cap}); partial ideal {partial}; try sampled mode")]
    ScanCap {
        count: String,
        cap: u64,
        partial: Box<Ideal>,
    },

    #[error("subset explosion: {k} terms exceeds subset cap {cap}")]
    SubsetExplosion { k: usize, cap: usize },

    #[error("degenerate modulus: b^m = b^n")]
    DegenerateModulus,

    #[error("index ({0}, {1}) out of range for dimension {2}")]
    IndexOutOfRange(usize, usize, usize),

    #[error("hypothesis {0} fails for B")]
    HypothesisFailed(&'static str),

    #[error("all coefficients are zero")]
    ZeroCoefficients,

    /// Malformed problem specification; `location` names the file and field.
    #[error("{location}: {message}")]
    Spec { location: String, message: String },

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub fn parse(column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            column,
            message: message.into(),
        }
    }

    /// True for errors caused by an enumeration or subset cap.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            Error::ResidueCap { .. } | Error::ScanCap { .. } | Error::SubsetExplosion { .. }
        )
    }
}
