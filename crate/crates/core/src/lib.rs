//! Reproducing kernels built as infinite products over iterated maps,
//! the weighted-composition operators `S_j f = e_j · (f ∘ R)` acting on them,
//! and numerical checks of the Cuntz relations those operators satisfy.
//!
//! The crate ships three families of worked models:
//!
//! * the unit disk with `b(z) = z²` (Szegő and Bergman kernels) and general
//!   finite Blaschke products ([`disk`]),
//! * the right half-plane with finite-dimensional de Branges `L(φ)` spaces
//!   ([`halfplane`]),
//! * the basin of `0` for `R(z) = z⁴ − 2z²` ([`julia`]).
//!
//! Everything is pointwise: operators act on [`cuntz::PointFunction`] closures
//! and adjoints act on finite kernel sections, so no quadrature is involved.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cuntz;
pub mod disk;
pub mod error;
pub mod halfplane;
pub mod iteration;
pub mod julia;
pub mod kernel;
pub mod onb;
pub mod render;
pub mod sampling;

pub use num_complex::Complex64;

pub use error::{Error, Result};

/// A point of the complex plane. Public operations reject non-finite points.
pub type ComplexPoint = Complex64;

pub(crate) fn ensure_finite(z: ComplexPoint) -> Result<ComplexPoint> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite { point: z })
    }
}

/// Deterministic pairwise summation. The reduction tree depends only on the
/// slice length, so results are reproducible regardless of how the terms
/// were produced.
pub fn pairwise_sum(terms: &[Complex64]) -> Complex64 {
    match terms.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => terms[0],
        n if n <= 8 => terms.iter().sum(),
        n => {
            let (lo, hi) = terms.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}
