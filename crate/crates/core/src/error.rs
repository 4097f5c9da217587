use thiserror::Error;

/// Errors raised by the algebra, series and solver layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("not Fermat: weight {weight} does not divide d = {d}")]
    NotFermat { d: u32, weight: u32 },
    #[error("index {index} is not narrow")]
    NotNarrow { index: usize },
    #[error("index {index} out of range for d = {d}")]
    IndexOutOfRange { index: usize, d: u32 },
    #[error("invalid chamber: {0}")]
    InvalidChamber(String),
    #[error("exponent {0} is not a multiple of 1/d")]
    ExponentNotInLattice(String),
    #[error("incompatible series configurations")]
    IncompatibleSeries,
    #[error("denominator has a factor outside the cyclotomic dictionary: {0}")]
    NonDictionaryFactor(String),
    #[error("cyclotomic block {block} exceeds the dictionary bound {n_max}")]
    DictionaryOverflow { block: u32, n_max: u32 },
    #[error("unstable locus does not exist: {0}")]
    UnstableLocusAbsent(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("insolvable system at monomial {monomial}: {reason}")]
    Insolvable { monomial: String, reason: String },
    #[error("truncation overflow at monomial {monomial}: block {block}, pole order {order}")]
    TruncationOverflow {
        monomial: String,
        block: u32,
        order: u32,
    },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
