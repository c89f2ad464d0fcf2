use thiserror::Error;

/// Failure modes shared by every module in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// A parameter violated its domain restriction at construction time.
    #[error("{0}")]
    InvalidParameter(String),

    /// A state component violated its domain restriction at construction time.
    #[error("{0}")]
    InvalidState(String),

    /// An input carried NaN or an infinity where a finite value is required.
    #[error("non-finite input to {0}")]
    NonFiniteInput(&'static str),

    /// A computation produced NaN or an infinity despite the saturation policies.
    #[error("non-finite result in {0}")]
    NonFinite(&'static str),

    /// The closed-form solution is undefined when no one is infected at t0.
    /// The recurrence handles that case instead; its y = 0 slice is constant.
    #[error("closed form requires y(t0) > 0; use the recurrence for y = 0")]
    ZeroInfected,

    /// A fixed-step integration was asked to take more steps than the
    /// desk-scale guard of 1e7 allows.
    #[error("requested span needs about {0:.3e} steps, above the 1e7 fixed-step guard")]
    SpanTooLarge(f64),

    /// Wraps an error from a per-index operation with the index that failed.
    #[error("at grid index {index}: {source}")]
    AtIndex {
        index: u64,
        source: Box<ModelError>,
    },
}

impl ModelError {
    pub(crate) fn at_index(self, index: u64) -> ModelError {
        ModelError::AtIndex {
            index,
            source: Box::new(self),
        }
    }
}
