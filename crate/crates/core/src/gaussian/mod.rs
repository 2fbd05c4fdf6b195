//! Closed-form Gaussian predictions for the ancilla register.

pub mod correlation;
pub mod covariance;
pub mod entropy;
pub mod random;
pub mod rates;

pub use correlation::CorrelationData;
pub use covariance::{
    build_covariance_blocks, cross_block, outcome_covariance, two_time_prediction, CovarianceBlocks,
    TwoTimePrediction,
};
pub use entropy::{
    canonical_transform, entropy_from_full_covariance, renyi2_log_det, renyi_entropy, von_neumann_entropy,
    CanonicalTransform, EntropyKind,
};
pub use rates::{purification_rate, s2_rate, PurificationKind, SpectralFunctions};
