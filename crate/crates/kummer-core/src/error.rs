//! Error type shared by every layer of the crate.
//!
//! All fallible operations return [`Result`]; errors carry enough context
//! (byte offsets for syntax errors, indices for domain errors) to be
//! actionable from the CLI without a stack trace.

use thiserror::Error;

/// Crate-wide error enum.
#[derive(Debug, Error)]
pub enum Error {
    /// The expression text failed to parse; `offset` is a byte offset into
    /// the source string.
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    /// A term evaluated to something other than a finite positive number.
    #[error("term at n = {n} is not a finite positive number: {detail}")]
    Domain { n: u64, detail: String },

    /// Division by an exact zero while evaluating a term.
    #[error("division by zero while evaluating at n = {n}")]
    DivisionByZero { n: u64 },

    /// A transcendental operation was requested in exact-rational mode.
    #[error("`{op}` is not rational-valued; switch to the high-precision float mode")]
    ExactTranscendental { op: &'static str },

    /// An exponent was too large to evaluate safely.
    #[error("exponent {exponent} exceeds the supported magnitude ({limit})")]
    ExponentTooLarge { exponent: String, limit: String },

    /// An index computation left the supported range.
    #[error("index overflow: {0}")]
    IndexOverflow(String),

    /// A witness sequence stopped being positive.
    #[error("witness is not positive at n = {n} (value {value}): {detail}")]
    NonpositiveWitness { n: u64, value: String, detail: String },

    /// A sequence required to be nonincreasing was caught increasing.
    #[error("sequence is not nonincreasing: a({n}) > a({prev}) (monotonicity violation at index {n})")]
    NotDecreasing { n: u64, prev: u64 },

    /// A check's stated precondition cannot hold on the requested window.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A sum constant was requested but no certified value is available.
    #[error("sum constant not certified: {0}")]
    SumNotCertified(String),

    /// An arbitrary-precision operation produced a non-finite result.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Exact and float values were mixed in one computation.
    #[error("numeric mode mismatch: {0}")]
    ModeMismatch(&'static str),

    /// A table-backed sequence was queried past its last entry.
    #[error("table has no value for index {n} (table length {len})")]
    TableIndex { n: u64, len: usize },

    /// Corpus file or corpus run problem.
    #[error("corpus error: {0}")]
    Corpus(String),

    /// Configuration problem (CLI, environment, or config file).
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
