use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} = {value} is outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid with {n_per_side} vertices per side exceeds the exact sampler cap of {max}")]
    GridTooLarge { n_per_side: usize, max: usize },

    #[error("path has no vertices")]
    EmptyPath,

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("vertex weight exponent {exponent:.3} exceeds the representable range (limit {limit})")]
    WeightRange { exponent: f64, limit: f64 },

    #[error("samples do not share a grid and sampler: {0}")]
    MixedSamples(String),

    #[error("abscissa grid is not sorted ascending at position {0}")]
    UnsortedGrid(usize),

    #[error("regression needs at least 3 points with distinct abscissae, got {0}")]
    DegenerateFit(usize),

    #[error("missing results for xi = {xi}, k = {k}: have {have}, need {need}")]
    MissingCell { xi: f64, k: u32, have: usize, need: usize },

    #[error("insufficient signal: only {usable} scales with nonzero counts")]
    InsufficientSignal { usable: usize },

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            domain,
        }
    }
}
