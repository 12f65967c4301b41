use thiserror::Error;

/// Errors produced by the fractal-spectra routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("scale must be at least 2, got {0}")]
    InvalidScale(i64),
    #[error("digit set is empty")]
    EmptyDigits,
    #[error("digit {0} appears more than once")]
    DuplicateDigit(i64),
    #[error("digit {0} is negative; only nonnegative digits are allowed here")]
    NegativeDigit(i64),
    #[error("digits {0} and {1} are congruent modulo {2}")]
    ResidueClash(i64, i64, i64),
    #[error("0 must belong to the digit set")]
    MissingZero,
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("tolerance {requested:e} is below the rounding floor {floor:e} of this evaluation")]
    ToleranceUnreachable { requested: f64, floor: f64 },
    #[error("undecidable by this test: the digit set has no closed-form zero set")]
    UndecidableZero,
    #[error("{what} needs {requested} entries, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        requested: u128,
        budget: u128,
    },
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
    #[error("A and A' are not complementing in {{0,...,{0}}}")]
    NotComplementing(i64),
    #[error("hypothesis failed: {0}")]
    Hypothesis(String),
    #[error("|z| = {modulus} exceeds the radius cap {cap}")]
    RadiusOutOfRange { modulus: f64, cap: f64 },
    #[error("frequency {0} is not in the truncated spectrum")]
    OutsideSpectrum(i64),
    #[error("not a spectral pair: {0}")]
    NotSpectral(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(tol))
    }
}
