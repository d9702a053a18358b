use chrono::NaiveDate;
use thiserror::Error;

use crate::lp::LpError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("need at least {need} knots, got {got}")]
    TooFewKnots { need: usize, got: usize },

    #[error("time {0} is negative")]
    NegativeTime(f64),

    #[error("date {date} is before valuation date {valuation}")]
    DateBeforeValuation {
        valuation: NaiveDate,
        date: NaiveDate,
    },

    #[error("invalid forward period [{start}, {end}]")]
    InvalidPeriod { start: f64, end: f64 },

    #[error("invalid accrual {0}")]
    InvalidAccrual(f64),

    #[error("tenor must be positive, got {0}")]
    InvalidTenor(f64),

    #[error("zero pivot at row {row} of tridiagonal system")]
    SingularSystem { row: usize },

    #[error("unsupported extrapolation '{0}'")]
    UnsupportedExtrapolation(String),

    #[error("unknown interpolation scheme '{0}'")]
    UnknownScheme(String),

    #[error("scheme {0} cannot be used here")]
    SchemeNotAllowed(String),

    #[error("empty accrual schedule between {start} and {end}")]
    EmptySchedule { start: NaiveDate, end: NaiveDate },

    #[error("invalid instrument: {0}")]
    InvalidInstrument(String),

    #[error("non-finite model value for quote {index}")]
    NonFiniteResidual { index: usize },

    #[error("calibration problem: {0}")]
    InvalidProblem(String),

    #[error("linear program failed: {0}")]
    Lp(#[from] LpError),
}
