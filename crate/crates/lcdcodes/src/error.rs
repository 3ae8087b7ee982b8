//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An unknown ring specification string.
    #[error("unsupported ring `{0}`; supported: Z4, Z8, Z9, Z27, F4u2, F8u2, F9u2 (and their quotients Z2, Z3, F4, F8, F9)")]
    UnsupportedRing(String),

    /// A quotient depth outside `1..=e`.
    #[error("invalid quotient depth s = {s} for a ring of nilpotency {e}; need 1 <= s < e")]
    InvalidQuotientDepth { s: usize, e: usize },

    /// Inversion of a non-unit.
    #[error("not a unit: `{0}`")]
    NotAUnit(String),

    /// A Frobenius power outside `0..w`.
    #[error("invalid Frobenius power h = {h}; this ring has automorphism order {w}")]
    InvalidFrobeniusPower { h: usize, w: usize },

    /// Mixing elements or words from different rings/shapes.
    #[error("mismatched {what}: `{left}` vs `{right}`")]
    Mismatch {
        what: &'static str,
        left: String,
        right: String,
    },

    /// Matrix dimensions incompatible with the requested operation.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// `solve_right` failed to produce an invertible solution.
    #[error("no invertible solution")]
    NoInvertibleSolution,

    /// A matrix that was expected to generate a code independently does not.
    #[error("not a generator matrix: {0}")]
    NotAGeneratorMatrix(String),

    /// An operation that requires a weakly-free code received one that is not.
    #[error("not weakly-free: {0}")]
    NotWeaklyFree(String),

    /// An operation that requires a complementary pair received something else.
    #[error("not an LCP: {0}")]
    NotAnLcp(String),

    /// Hermitian counting requested over a ring whose automorphism order is odd.
    #[error("Hermitian counting needs even automorphism order, got w = {w}")]
    HermitianNeedsEvenW { w: usize },

    /// Enumeration refused because the ambient module is too large.
    #[error("enumeration budget exceeded: |M| = {module_size} > budget {budget}")]
    BudgetExceeded { module_size: u64, budget: u64 },

    /// The Gray map is only defined on the alphabet it is defined on.
    #[error("gray map is only defined over Z4, got `{0}`")]
    GrayUnsupported(String),

    /// Lee weights are only tabulated for some alphabets.
    #[error("no Lee weight table for `{0}`; use the Hamming metric for this alphabet")]
    LeeUnsupported(String),

    /// Text parsing failure (element, matrix, code file, fixture table).
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Anything contract-shaped that does not deserve its own variant.
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    /// Shorthand for a [`Error::Parse`] at a given 1-based line.
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// Shorthand for [`Error::Mismatch`].
    pub fn mismatch(what: &'static str, left: impl ToString, right: impl ToString) -> Self {
        Error::Mismatch {
            what,
            left: left.to_string(),
            right: right.to_string(),
        }
    }
}
