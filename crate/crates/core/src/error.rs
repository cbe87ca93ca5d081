use thiserror::Error;

/// Domain errors raised by the numeric modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("trial factor must be at least 1 (got l = 0)")]
    ZeroModulus,

    #[error("trial factor l = {l} is below the minimum of 2")]
    TrialFactorTooSmall { l: String },

    #[error("sum order must be at least 2 (got n = {order})")]
    InvalidOrder { order: u32 },

    #[error("cannot draw {count} distinct values from [0, {m_max}]")]
    SampleTooLarge { count: u64, m_max: u64 },

    #[error("randomized sums need at least one term")]
    EmptySample,

    #[error("complete Gauss sums are only defined for order 2 (got n = {order})")]
    CompleteRequiresQuadratic { order: u32 },

    #[error("complete Gauss sum over l = {l} terms exceeds the cap of {cap}; lift the cap explicitly")]
    CompleteTooLarge { l: String, cap: u64 },

    #[error("invalid trial-factor window [{l_min}, {l_max}]")]
    InvalidWindow { l_min: String, l_max: String },

    #[error("epsilon = 0 (a true factor) can never be suppressed")]
    ZeroEpsilon,

    #[error("value must be finite (got {0})")]
    NonFinite(f64),

    #[error("the curlicue identity check is only defined for order 2 (got n = {order})")]
    NotQuadratic { order: u32 },

    #[error("flip angle {theta} over {terms} pulses gives a total rotation above pi/2")]
    FlipAngleTooLarge { theta: f64, terms: u64 },

    #[error("flip angle must be positive and finite (got {0})")]
    InvalidFlipAngle(f64),

    #[error("invalid spin state: {0}")]
    InvalidState(String),

    #[error("cannot factor {n}: input must be at least 2")]
    FactorInputTooSmall { n: String },

    #[error("cannot factor {n} by trial division: input exceeds 10^18")]
    FactorInputTooLarge { n: String },

    #[error("scaling study needs at least one case")]
    EmptyCases,

    #[error("invalid natural number {0:?}")]
    ParseNatural(String),

    #[error("search cap must be at least 1")]
    InvalidCap,
}

pub type Result<T> = std::result::Result<T, Error>;
