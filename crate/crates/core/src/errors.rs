//! Error types shared across the crate.

use thiserror::Error;

/// A wave-field evaluation failed at a specific point.
///
/// Velocity fields are ratios `∇ψ/ψ`, so they blow up at nodes of ψ; the
/// dispherical wave additionally diverges at the two source points. Both
/// conditions are reported instead of returning garbage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum FieldError {
    /// |ψ| fell below the node threshold; the velocity field is singular
    /// at wave-function nodes.
    #[error("wave-function node: |psi| below threshold")]
    NodePoint,
    /// The point is within `singular_radius` of a source of the dispherical
    /// wave (r₁ or r₂ ≈ 0).
    #[error("source singularity: |r| below singular radius")]
    SingularPoint,
    /// The evaluation overflowed (non-finite intermediate or result).
    #[error("numeric overflow in field evaluation")]
    Overflow,
}

/// A configuration value was rejected. The key names the offending field.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("config error: {key}: {message}")]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: &str, message: impl Into<String>) -> Self {
        ConfigError {
            key: key.to_string(),
            message: message.into(),
        }
    }
}
