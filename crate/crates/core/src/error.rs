use thiserror::Error;

/// Crate-wide error type.
///
/// Variants map onto the failure classes of the pipeline stages so callers
/// (in particular the CLI's exit-code mapping and the experiment engine's
/// fallback logic) can dispatch on them.
#[derive(Debug, Error)]
pub enum Error {
    /// Bad configuration: unknown ticker, unknown model id, invalid option
    /// combinations.
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed input text (FRED CSV, result CSV, adapter response).
    #[error("parse error: {0}")]
    Parse(String),

    /// A retryable data-source failure for one ticker.
    #[error("fetch error for {ticker}: {message}")]
    Fetch { ticker: String, message: String },

    /// Panel alignment failure (e.g. no value available to seed a
    /// forward-fill at the start of a series).
    #[error("alignment error: {0}")]
    Alignment(String),

    /// Index arithmetic out of range (window slicing, plan generation).
    #[error("bounds error: {0}")]
    Bounds(String),

    /// An operation received input it cannot work with (empty window,
    /// series too short, mismatched lengths).
    #[error("input error: {0}")]
    Input(String),

    /// The design matrix is rank deficient.
    #[error("singular design matrix: column {column} is linearly dependent")]
    SingularDesign { column: usize },

    /// A matrix decomposition failed (non-positive-definite input).
    #[error("decomposition error: {0}")]
    Decomposition(String),

    /// A numeric domain violation: non-finite objective at the start point,
    /// zero actuals in a percentage error.
    #[error("domain error: {0}")]
    Domain(String),

    /// Model estimation did not converge.
    #[error("fit failure: {0}")]
    FitFailure(String),

    /// Every candidate in a model search failed to fit.
    #[error("selection error: {0}")]
    Selection(String),

    /// An integration state does not match the forecast it should invert.
    #[error("state error: {0}")]
    State(String),

    /// Results cannot be aggregated together (mixed horizons in one group).
    #[error("grouping error: {0}")]
    Grouping(String),

    /// An external adapter process misbehaved (nonzero exit, malformed or
    /// non-finite response, timeout).
    #[error("adapter error: {0}")]
    Adapter(String),

    /// Report files could not be written.
    #[error("emission error: {0}")]
    Emission(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
