use thiserror::Error;

use crate::scalar::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid number literal `{0}`")]
    Number(String),

    #[error("branches disagree at breakpoint {at}: left gives {left}, right gives {right}")]
    Continuity { at: String, left: String, right: String },

    #[error("branch {branch} maps outside the domain (value {value})")]
    ImageEscapes { branch: usize, value: String },

    #[error("branch {0} has zero slope")]
    ZeroSlope(usize),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("point {0} lies outside the domain")]
    OutsideDomain(String),

    #[error("one-sided derivative from the {side} is not defined at the domain endpoint {at}")]
    InadmissibleSide { side: &'static str, at: String },

    #[error("{0} is not a turning point")]
    NotTurningPoint(String),

    #[error("the involution around {c} is not defined at {y}")]
    TauUndefined { c: String, y: String },

    #[error("operation requires an all-affine map")]
    RequiresAffine,

    #[error("enumeration needs {words} words, budget is {budget}")]
    BudgetExceeded { words: u128, budget: u128 },

    #[error("word {0} has a whole interval of periodic points")]
    NonIsolatedPeriodicPoints(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("non-hyperbolic periodic orbit of period {period} through {point}")]
    NonHyperbolic { period: usize, point: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn outside(x: &Rational) -> Self {
        Error::OutsideDomain(crate::scalar::fmt_rational(x))
    }
}
