use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An enclosure could not decide a comparison within the precision budget.
    #[error("needs refinement: undecided at {bits} bits ({context})")]
    NeedsRefinement { bits: u64, context: String },
    /// An Engel expansion terminated (rational input) before the requested depth.
    #[error("expansion terminated after {length} digits, depth {depth} requested: input is rational")]
    DegenerateTermination { length: usize, depth: usize },
    /// A configured cap (depth, exponent, iteration) was reached.
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("dependent dilations: ln {p} / ln {q} is rational")]
    DependentDilations { p: String, q: String },
    #[error("{0} is not prime")]
    PrimalityFailure(String),
    #[error("{base}^(1/{degree}) is an integer")]
    ExactRoot { base: String, degree: u32 },
    #[error("prefix too short: no digit exceeds {needed} in the available {length} digits")]
    PrefixTooShort { needed: String, length: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for failures caused by resource limits rather than mathematics.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::NeedsRefinement { .. } | Error::Budget(_))
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

/// A computation that stopped early, carrying the best result reached so far.
#[derive(Debug, Clone)]
pub struct Exhausted<T> {
    pub best: Option<T>,
    pub cause: Error,
}

impl<T> Exhausted<T> {
    pub fn new(best: Option<T>, cause: Error) -> Self {
        Exhausted { best, cause }
    }

    pub fn bare(cause: Error) -> Self {
        Exhausted { best: None, cause }
    }
}

impl<T> From<Error> for Exhausted<T> {
    fn from(cause: Error) -> Self {
        Exhausted::bare(cause)
    }
}

impl<T> From<Exhausted<T>> for Error {
    fn from(e: Exhausted<T>) -> Self {
        e.cause
    }
}

impl<T> fmt::Display for Exhausted<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cause)?;
        if self.best.is_some() {
            write!(f, " (partial result available)")?;
        }
        Ok(())
    }
}

impl<T: fmt::Debug> std::error::Error for Exhausted<T> {}
