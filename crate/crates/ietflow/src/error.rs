use thiserror::Error;

/// Every failure the library reports.
///
/// [`Error::exit_code`] maps each variant to the command-line convention:
/// 1 for invalid input, 2 for exhausted precision, 3 for a probe whose
/// hypotheses do not hold.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("reducible pair: the first {0} positions are exchanged among themselves")]
    ReduciblePair(usize),
    #[error("length {0} is not positive")]
    NonpositiveLength(usize),
    #[error("point {0} lies outside the domain")]
    OutOfDomain(String),
    #[error("arc {0} is not a discontinuity of the circle exchange")]
    CutNotADiscontinuity(usize),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("equal critical lengths at induction step {step}")]
    EqualCriticalLengths { step: usize },
    #[error("point {0} is outside the induced interval")]
    OutOfInducedInterval(String),
    #[error("no periodic behaviour detected within {0} steps")]
    NotDetected(usize),
    #[error("matrix has a nonpositive entry at ({0}, {1})")]
    NonpositiveEntry(usize, usize),
    #[error("loop does not return to its starting pair")]
    LoopNotClosed,
    #[error("matrix has no strictly positive power")]
    MatrixNotPrimitive,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("constant {0} is negative")]
    NegativeConstant(String),
    #[error("illegal pattern of vanishing constants: {0}")]
    IllegalZeroPattern(String),
    #[error("roof is not positive, witness x = {witness}")]
    NonpositiveRoof { witness: String },
    #[error("evaluation at singularity {index} (orbit step {iterate})")]
    AtSingularity { index: usize, iterate: i64 },
    #[error("smooth part has nonzero mean derivative {0}")]
    NonzeroMeanDerivative(String),
    #[error("bounded partial quotients cannot be verified for a float rotation number")]
    UnboundedQuotientsUnverifiable,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::PrecisionExhausted(_) => 2,
            Error::HypothesisViolated(_) => 3,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "Parse",
            Error::InvalidPermutation(_) => "InvalidPermutation",
            Error::ReduciblePair(_) => "ReduciblePair",
            Error::NonpositiveLength(_) => "NonpositiveLength",
            Error::OutOfDomain(_) => "OutOfDomain",
            Error::CutNotADiscontinuity(_) => "CutNotADiscontinuity",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::EqualCriticalLengths { .. } => "EqualCriticalLengths",
            Error::OutOfInducedInterval(_) => "OutOfInducedInterval",
            Error::NotDetected(_) => "NotDetected",
            Error::NonpositiveEntry(..) => "NonpositiveEntry",
            Error::LoopNotClosed => "LoopNotClosed",
            Error::MatrixNotPrimitive => "MatrixNotPrimitive",
            Error::IndexOutOfRange(_) => "IndexOutOfRange",
            Error::NegativeConstant(_) => "NegativeConstant",
            Error::IllegalZeroPattern(_) => "IllegalZeroPattern",
            Error::NonpositiveRoof { .. } => "NonpositiveRoof",
            Error::AtSingularity { .. } => "AtSingularity",
            Error::NonzeroMeanDerivative(_) => "NonzeroMeanDerivative",
            Error::UnboundedQuotientsUnverifiable => "UnboundedQuotientsUnverifiable",
            Error::HypothesisViolated(_) => "HypothesisViolated",
            Error::Invalid(_) => "Invalid",
            Error::Io(_) => "Io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
