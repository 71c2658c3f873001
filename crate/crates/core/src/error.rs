use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter is outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Structurally invalid input (unsorted points, negative bids, shape mismatch).
    #[error("malformed input: {0}")]
    MalformedInput(String),

    /// A density was zero where the virtual-value formula needs to divide by it.
    #[error("density is zero at v = {0}; virtual value undefined")]
    Singularity(f64),

    /// The virtual valuation is negative on the whole support.
    #[error("virtual value is negative everywhere; no reserve price exists")]
    NoReserve,

    /// Rejection sampling ran out of raw draws before reaching the requested
    /// number of conditioned trials.
    #[error(
        "rejection budget of {budget} raw draws exhausted after {conditioned} of {requested} \
         conditioned trials (partial error rate {partial_rate})"
    )]
    BudgetExceeded {
        budget: u64,
        conditioned: u64,
        requested: u64,
        partial_rate: f64,
    },

    /// Failed to parse a distribution spec, config file, or data file.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn malformed(msg: impl Into<String>) -> Self {
        Error::MalformedInput(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
