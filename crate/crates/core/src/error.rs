use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid user profile {user}: {reason}")]
    InvalidUser { user: usize, reason: String },

    #[error("invalid channel environment: {0}")]
    InvalidEnv(String),

    #[error("decision profile has {got} entries, instance has {expected} users")]
    LengthMismatch { expected: usize, got: usize },

    #[error("decision {decision} of user {user} is outside 0..={channels}")]
    DecisionOutOfRange { user: usize, decision: usize, channels: usize },

    #[error("user {0} computes locally; uplink quantities are undefined")]
    LocalDecision(usize),

    #[error("channel {channel} is outside 1..={channels}")]
    ChannelOutOfRange { channel: usize, channels: usize },

    #[error("instance too large: {size} exceeds cap {cap}")]
    InstanceTooLarge { size: u128, cap: u128 },

    #[error("bound inapplicable: {0}")]
    BoundInapplicable(String),

    #[error("operation is only defined under the interference access model")]
    ContentionUnsupported,

    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("potential did not strictly decrease at slot {slot} ({before} -> {after})")]
    NonDecreasingPotential { slot: usize, before: f64, after: f64 },
}

pub type Result<V, E = Error> = std::result::Result<V, E>;
