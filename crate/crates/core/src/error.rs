use thiserror::Error;

/// Errors raised anywhere in the geometry pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuresError {
    #[error("coordinate {coordinate} = {value} lies outside [{lower}, {upper}]")]
    OutOfDomain {
        coordinate: &'static str,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("non-finite input for coordinate {coordinate}")]
    NonFiniteInput { coordinate: &'static str },

    #[error("degenerate spectrum ({lambda1}, {lambda2}, {lambda3}): {reason}")]
    DegenerateSpectrum {
        lambda1: f64,
        lambda2: f64,
        lambda3: f64,
        reason: &'static str,
    },

    #[error("metric block is singular (condition number {condition:.3e})")]
    SingularMetric { condition: f64 },

    #[error("wedge degree {degree} exceeds the manifold dimension 8")]
    DegreeOverflow { degree: usize },

    #[error("form degrees differ ({left} vs {right})")]
    DegreeMismatch { left: usize, right: usize },

    #[error("sample {index}: every redraw tripped the degeneracy guard ({attempts} attempts)")]
    RetryExhausted { index: u64, attempts: u32 },

    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
}

impl BuresError {
    /// True for failures caused by where the manifold was probed rather than
    /// by a malformed request.
    pub fn is_numeric_domain(&self) -> bool {
        matches!(
            self,
            BuresError::OutOfDomain { .. }
                | BuresError::NonFiniteInput { .. }
                | BuresError::DegenerateSpectrum { .. }
                | BuresError::SingularMetric { .. }
                | BuresError::RetryExhausted { .. }
        )
    }
}

pub type Result<T, E = BuresError> = std::result::Result<T, E>;
