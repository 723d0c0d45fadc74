//! Error types shared by the whole crate.

use thiserror::Error;

/// Syntax error produced by the text-format parsers, with a source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {line}:{col}: {message}")]
pub struct ParseError {
    /// 1-based line of the offending token.
    pub line: usize,
    /// 1-based column of the offending token.
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

/// Errors raised by algebra operations and file loaders.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degree vector length mismatch: {left} vs {right}")]
    DegreeLengthMismatch { left: usize, right: usize },

    #[error("invalid sign table: {reason}")]
    InvalidSignTable { reason: String },

    #[error("jet shape mismatch: {expected_vars} vars at order {expected_order} vs {found_vars} vars at order {found_order}")]
    JetShapeMismatch {
        expected_vars: usize,
        expected_order: usize,
        found_vars: usize,
        found_order: usize,
    },

    #[error("variable index {index} out of range 1..={count}")]
    VariableOutOfRange { index: usize, count: usize },

    #[error("composition argument has a nonzero constant term")]
    NonzeroConstantTerm,

    #[error("not invertible: the independent term vanishes at the center")]
    NotInvertible,

    #[error("formal signature mismatch")]
    SignatureMismatch,

    #[error("odd formal variable {variable} carries exponent > 1")]
    OddExponent { variable: usize },

    #[error("formal variable {variable} must have nonzero degree")]
    ZeroDegree { variable: usize },

    #[error("series is not homogeneous")]
    NotHomogeneous,

    #[error("requested order {requested} exceeds maximum {maximum}")]
    OrderExceeded { requested: usize, maximum: usize },

    #[error("approximation degree must be at least 1")]
    ZeroApproximationDegree,

    #[error("expected {expected} coordinate series, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("coordinate {coordinate}: pullback has the wrong degree")]
    DegreeMismatch { coordinate: String },

    #[error("coordinate {coordinate}: pullback is not centered (nonzero constant term)")]
    NotCentered { coordinate: String },

    #[error("domain box must contain the origin in its interior")]
    InvalidDomainBox,

    #[error("no transition between charts {from} and {to}")]
    MissingTransition { from: String, to: String },

    #[error("no chart with id {id}")]
    MissingChart { id: String },

    #[error("duplicate chart id {id}")]
    DuplicateChart { id: String },

    #[error("witness has no entry for chart {id}")]
    MissingWitnessEntry { id: String },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
