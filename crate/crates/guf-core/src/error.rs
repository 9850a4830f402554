use core::fmt;

/// Errors shared by the numerics, design, sampling and filter modules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Error {
    /// A matrix expected to be symmetric positive definite failed to
    /// factorize, even after the one-shot diagonal jitter retry.
    NotPositiveDefinite,
    /// A matrix violated the symmetry tolerance.
    NotSymmetric,
    /// Requested the radius of a zero-mass tail (d = 0), which is infinite.
    ZeroTailMass,
    /// The bracketing quantile solve exceeded its iteration cap.
    NonConvergent,
    /// Tried to canonicalize the zero vector.
    ZeroVector,
    /// Importance-region bounds out of order (d1 > d2).
    OrderViolation,
    /// Some stretch radius r_k + beta is negative: the level/design
    /// configuration cannot match the covariance and must be fixed by
    /// the caller.
    NegativeStretchRadius,
    /// Unscented scale parameter with kappa + n <= 0.
    ScaleDegenerate,
    /// A tensor-product rule would exceed the configured point cap.
    DimensionTooLarge,
    /// Operand dimensions do not agree.
    DimensionMismatch,
    /// An argument fell outside its documented domain.
    InvalidDomain(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPositiveDefinite => {
                write!(f, "matrix is not positive definite (jitter retry failed)")
            }
            Error::NotSymmetric => write!(f, "matrix is not symmetric within tolerance"),
            Error::ZeroTailMass => write!(f, "tail mass d = 0 has no finite radius"),
            Error::NonConvergent => write!(f, "bracketing solve exceeded its iteration cap"),
            Error::ZeroVector => write!(f, "zero vector has no canonical generator"),
            Error::OrderViolation => write!(f, "importance bounds out of order (d1 > d2)"),
            Error::NegativeStretchRadius => {
                write!(f, "stretch radius r + beta is negative for some level")
            }
            Error::ScaleDegenerate => write!(f, "unscented scale kappa + n must be positive"),
            Error::DimensionTooLarge => write!(f, "point count exceeds the configured cap"),
            Error::DimensionMismatch => write!(f, "operand dimensions do not agree"),
            Error::InvalidDomain(what) => write!(f, "argument outside domain: {what}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
