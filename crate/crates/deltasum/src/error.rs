use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside the supported range ({limit})")]
    OutOfRange {
        what: &'static str,
        value: String,
        limit: String,
    },

    #[error("table of {requested} entries exceeds the memory budget of {limit} entries")]
    MemoryBudget { requested: u64, limit: u64 },

    #[error("modulus {0} must be odd")]
    EvenModulus(u64),

    #[error("{a} is not invertible modulo {q}")]
    NotInvertible { a: i64, q: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("quadratic form {a}x^2 + {b}y^2 + 2*{c}xy is not positive definite")]
    NotPositiveDefinite { a: i64, b: i64, c: i64 },

    #[error("{n} does not divide {q}")]
    NotDivisor { n: u64, q: u64 },

    #[error("quadrature did not converge: achieved error {achieved:e}, target {target:e}")]
    Quadrature { achieved: f64, target: f64 },

    #[error("truncation error {achieved:e} exceeds budget {budget:e}")]
    Truncation { achieved: f64, budget: f64 },

    #[error("phase frequency {frequency:e} lies beyond the quadrature regime (limit {limit:e})")]
    FrequencyRegime { frequency: f64, limit: f64 },

    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),

    #[error("table input: {0}")]
    Table(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn range(what: &'static str, value: impl ToString, limit: impl ToString) -> Self {
        Error::OutOfRange {
            what,
            value: value.to_string(),
            limit: limit.to_string(),
        }
    }
}
