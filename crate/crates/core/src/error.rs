use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource limit exceeded: {what} ({value} > {limit})")]
    ResourceLimit {
        what: String,
        value: u128,
        limit: u128,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("cost order violated: {0}")]
    CostOrder(String),

    #[error("G bound violated at n={n}, s={s}: G={g} > bound={bound}")]
    BoundViolation { n: usize, s: usize, g: f64, bound: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
