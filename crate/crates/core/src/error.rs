use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value outside the mathematical domain of an operation (e.g. a negative eigenvalue).
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid quadrature, grid, or builder configuration.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("shape mismatch: expected {expected} coefficients, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    /// Reciprocal or square root of a series whose constant term does not allow it.
    #[error("singular series: {0}")]
    SingularSeries(String),

    /// A truncation order too small for the requested grade or coefficient.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("non-finite value {value} at t = {t}")]
    NonFinite { t: f64, value: f64 },

    #[error("cannot fit decay: {0}")]
    CannotFit(String),

    #[error("fit window too narrow: {0}")]
    Window(String),

    /// Scenario document failed validation; `pointer` is a JSON pointer to the offending field.
    #[error("scenario error at `{pointer}`: {message}")]
    Schema { pointer: String, message: String },

    #[error("unknown scenario `{name}`; built-in scenarios: {available}")]
    UnknownScenario { name: String, available: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
