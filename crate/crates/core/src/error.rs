use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("inner series has a nonzero constant term; composition is not formal")]
    NonzeroConstantTerm,

    #[error("composition with a truncated series needs a finite t-order")]
    UnboundedComposition,

    #[error("series has no compositional inverse: {0}")]
    NotInvertible(&'static str),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("requested order {requested} exceeds available order {available}")]
    OrderExceeded { requested: usize, available: usize },

    #[error("operands live over different bases")]
    BasisMismatch,

    #[error("operands have different generators")]
    GeneratorMismatch,

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("empty factor list")]
    EmptyFactors,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("partial sums did not settle within {depth} terms (last term {last_term:e})")]
    Divergence { depth: usize, last_term: f64 },
}
