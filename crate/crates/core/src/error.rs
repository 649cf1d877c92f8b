use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    #[error("symbol `{symbol}` of variable `{variable}` is not in the support")]
    NotInSupport { variable: String, symbol: String },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("binding error: {0}")]
    Binding(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("decode error in stream `{stream}` at symbol {position}: {reason}")]
    Decode {
        stream: String,
        position: usize,
        reason: String,
    },

    #[error("delivery failed at terminal `{terminal}`: rank {rank} of {needed}")]
    Delivery {
        terminal: String,
        rank: usize,
        needed: usize,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn decode(stream: &str, position: usize, reason: impl Into<String>) -> Self {
        Error::Decode {
            stream: stream.to_owned(),
            position,
            reason: reason.into(),
        }
    }
}
