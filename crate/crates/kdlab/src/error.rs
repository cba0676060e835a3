//! Error type shared by every module.

use thiserror::Error;

/// Library-wide error enumeration.
///
/// The CLI maps these onto its exit-code contract: [`Error::Parse`] and
/// [`Error::Io`] are input failures (exit 2), everything else is a math-layer
/// failure (exit 3).
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix or vector dimensions do not line up.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// An index set referenced a row or column outside the matrix.
    #[error("bounds error: {0}")]
    Bounds(String),

    /// Input violated a documented precondition (non-unitary, non-normalized,
    /// bad permutation, |s| != 1, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// Combinatorial size cap exceeded (minor enumeration, tensor products,
    /// diagram scans).
    #[error("size error: {0}")]
    SizeCap(String),

    /// A check with explicit hypotheses was invoked on input that does not
    /// satisfy them; distinct from the check returning `false`.
    #[error("inapplicable: {0}")]
    Inapplicable(String),

    /// Requested a state from a zero-dimensional subspace.
    #[error("no state: {0}")]
    NoState(String),

    /// Sampling could not realize the requested exact support profile; the
    /// drop-one dimension condition fails for this subset pair.
    #[error("degenerate support: {0}")]
    DegenerateSupport(String),

    /// A numerical procedure failed (line-search floor reached, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An iterative schedule ran out of budget.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Malformed JSON / CSV / flag value.
    #[error("parse error: {0}")]
    Parse(String),

    /// Filesystem failure while reading or writing artifacts.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
