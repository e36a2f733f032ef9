use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("layout conflict: register `{0}` appears on both sides")]
    LayoutConflict(String),

    #[error("layout error: {0}")]
    Layout(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("partition error: {0}")]
    Partition(String),

    #[error("impossible outcome: probability {probability:e} is below {threshold:e}")]
    ImpossibleOutcome { probability: f64, threshold: f64 },

    #[error("protocol order error: {0}")]
    ProtocolOrder(String),

    #[error("resource cap exceeded: {what} needs dimension {dim} (cap {cap})")]
    ResourceCap {
        what: String,
        dim: usize,
        cap: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
