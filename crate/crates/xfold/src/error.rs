//! Library-wide error type.  Display strings lead with a stable kebab-case
//! name so callers (and the CLI's failure JSON) can match on them.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A size parameter is outside the operation's domain (e.g. `n < 3` for a
    /// polygon, `n < 2` for a sorting network, dimension mismatches).
    #[error("invalid-size: {0}")]
    InvalidSize(String),

    /// The requested scalar mode is not supported by this construction
    /// (regular polygons have irrational vertex coordinates).
    #[error("unsupported-mode: {0}")]
    UnsupportedMode(String),

    /// A grid-point selector is malformed: wrong count, duplicates, or
    /// out-of-range values.
    #[error("invalid-selector: {0}")]
    InvalidSelector(String),

    /// An enumeration would exceed the configured cap.
    #[error("too-large: {0}")]
    TooLarge(String),

    /// A vertex lies strictly outside a facet, so no slack matrix exists
    /// (beyond the float-mode clamping band).
    #[error("not-contained: {0}")]
    NotContained(String),

    /// A factor column/row is identically zero where a nonzero one is
    /// required (normalization cannot scale a zero factor).
    #[error("degenerate-factor: {0}")]
    DegenerateFactor(String),

    /// Folding failed to reach its terminal point/facet within tolerance.
    #[error("folding-divergence: {0}")]
    FoldingDivergence(String),

    /// Float-mode arithmetic lost too much precision to certify a result
    /// (e.g. the simplex iteration cap was exceeded).
    #[error("numerical-failure: {0}")]
    NumericalFailure(String),

    /// An input value violates a documented precondition.
    #[error("invalid-input: {0}")]
    InvalidInput(String),

    /// A lifted vertex does not satisfy the extension equations.
    #[error("lift-failure: {0}")]
    LiftFailure(String),

    /// Input rows/vertices are degenerate (e.g. rank below the requested
    /// selection size).
    #[error("degenerate-input: {0}")]
    DegenerateInput(String),

    /// Malformed serialized data.
    #[error("parse-error: {0}")]
    Parse(String),

    #[error("io-error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// The stable kebab-case name leading this error's Display string.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidSize(_) => "invalid-size",
            Error::UnsupportedMode(_) => "unsupported-mode",
            Error::InvalidSelector(_) => "invalid-selector",
            Error::TooLarge(_) => "too-large",
            Error::NotContained(_) => "not-contained",
            Error::DegenerateFactor(_) => "degenerate-factor",
            Error::FoldingDivergence(_) => "folding-divergence",
            Error::NumericalFailure(_) => "numerical-failure",
            Error::InvalidInput(_) => "invalid-input",
            Error::LiftFailure(_) => "lift-failure",
            Error::DegenerateInput(_) => "degenerate-input",
            Error::Parse(_) => "parse-error",
            Error::Io(_) => "io-error",
        }
    }
}
