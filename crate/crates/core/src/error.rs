use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("id space size L={0} is below the minimum of 3")]
    IdSpaceTooSmall(u64),
    #[error("threshold t={t} is outside [3, {l}]")]
    ThresholdOutOfRange { l: u64, t: u64 },
    #[error("network size x={x} is outside [3, {l}]")]
    NetworkSizeOutOfRange { l: u64, x: u64 },
    #[error("network size x={0} is below the minimum of 3")]
    NetworkTooSmall(u64),
    #[error("knowledge sharing needs at least 2 output values, got k={0}")]
    TooFewOutputs(u64),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("model `{name}` produced {value} at {at}, outside [0, 1]")]
    UtilityOutOfRange {
        name: String,
        at: String,
        value: String,
    },
    #[error("L={l} exceeds the brute-force limit of {max}")]
    TooLargeForBruteForce { l: u64, max: u64 },
    #[error("invalid precision `{0}` (expected `exact` or `float:<bits>` with bits >= 64)")]
    InvalidPrecision(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
