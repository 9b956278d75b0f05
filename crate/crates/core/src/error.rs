use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("digit {digit} out of range for base {base}")]
    DigitOutOfRange { digit: String, base: String },

    #[error("empty digit set")]
    EmptyDigitSet,

    #[error("budget exceeded: {needed} evaluations requested, budget is {budget}")]
    Budget { needed: f64, budget: u64 },

    #[error("operation needs an enumerable base, got {0}")]
    SymbolicBase(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Default cap on lattice points, grid cells or cylinders visited by one call.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

pub(crate) fn check_budget(needed: f64, budget: u64) -> Result<()> {
    if !(needed <= budget as f64) {
        return Err(Error::Budget { needed, budget });
    }
    Ok(())
}
