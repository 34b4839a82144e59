use num_complex::Complex64;
use thiserror::Error;

use crate::iteration::OrbitStatus;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite point {point}")]
    NonFinite { point: Complex64 },

    #[error("orbit modulus {modulus:e} exceeded the overflow limit at step {step}")]
    EscapeOverflow { step: usize, modulus: f64 },

    #[error("point {point} is outside the kernel domain (orbit {status:?})")]
    Domain { point: Complex64, status: OrbitStatus },

    #[error("{what}: budget of {limit} exhausted")]
    Budget { what: &'static str, limit: usize },

    #[error("index {index} out of range for {count} symbols")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("pole at {point}")]
    Pole { point: Complex64 },

    #[error("point {point} outside the open right half-plane")]
    HalfPlane { point: Complex64 },

    #[error("singular quotient: z + conj(w) = 0 at z = {z}, w = {w}")]
    SingularQuotient { z: Complex64, w: Complex64 },

    #[error("kernel sections at the probe points are rank deficient")]
    RankDeficient,

    #[error("empty kernel section")]
    EmptySection,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("kernel entry ({i}, {j}): {source}")]
    GramEntry {
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors that mean "the point is not where the model lives".
    pub fn is_domain(&self) -> bool {
        match self {
            Error::Domain { .. }
            | Error::HalfPlane { .. }
            | Error::Pole { .. }
            | Error::EscapeOverflow { .. }
            | Error::SingularQuotient { .. }
            | Error::NonFinite { .. } => true,
            Error::GramEntry { source, .. } => source.is_domain(),
            _ => false,
        }
    }
}
