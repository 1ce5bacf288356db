use std::fmt;

use thiserror::Error;

/// A failure of the Latin property: along `position`, with the other
/// arguments fixed to `fixed`, the symbol `symbol` occurs more than once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Zero-based argument position of the line.
    pub position: usize,
    /// The full argument tuple of the second occurrence; the entry at
    /// `position` is the varying one.
    pub fixed: Vec<u8>,
    pub symbol: u8,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self
            .fixed
            .iter()
            .enumerate()
            .map(|(i, v)| if i == self.position { "*".to_string() } else { v.to_string() })
            .collect();
        write!(f, "symbol {} repeated along position {} at ({})", self.symbol, self.position + 1, args.join(","))
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed dimensions: {0}")]
    Structural(String),

    #[error("not a quasigroup: {0}")]
    NotQuasigroup(Violation),

    #[error("relation is not a quasigroup graph: {0}")]
    NotPredicate(String),

    #[error("position {position} out of range for arity {arity}")]
    PositionOutOfRange { position: usize, arity: usize },

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("order mismatch: expected {expected}, found {found}")]
    OrderMismatch { expected: usize, found: usize },

    #[error("invalid retract: {0}")]
    InvalidRetract(String),

    #[error("invalid superposition: {0}")]
    InvalidSuperposition(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// An internal cross-check disagreed with a statement that must hold
    /// for every valid input.
    #[error("consistency violation: {0}")]
    Consistency(String),

    /// A step of the retract-based reconstruction failed on an input that
    /// satisfies its hypotheses.
    #[error("theorem violation: {0}")]
    TheoremViolation(String),

    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
