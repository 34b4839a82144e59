//! `R(z) = z⁴ − 2z² = P(P(z))` with `P(z) = z² − 1`, the product kernel
//! `∏ₙ (1 + Rₙ(z)·conj(Rₙ(w)))` on the basin of `0`, and the representation
//! `S₀f = f∘R`, `S₁f = z·(f∘R)`.
//!
//! `R` also fixes `−1` (superattracting, since `R'(−1) = 0`), so points in
//! that basin never enter the contraction disk at `0` and classify as
//! unresolved.

use num_complex::Complex64;
use std::sync::Arc;

use crate::cuntz::{AdjointVariant, Representation, SymbolFamily};
use crate::iteration::{classify_orbit, sort_lexicographic, IterationMap, OrbitStatus};
use crate::kernel::{CauchyFactor, KernelValue, ProductKernelModel, TruncationPolicy};
use crate::{ensure_finite, ComplexPoint, Result};

#[derive(Debug, Clone, Copy, Default)]
pub struct JuliaMap;

impl JuliaMap {
    /// `P(z) = z² − 1`.
    pub fn p(z: ComplexPoint) -> ComplexPoint {
        z * z - 1.0
    }
}

impl IterationMap for JuliaMap {
    fn evaluate(&self, z: ComplexPoint) -> ComplexPoint {
        let s = z * z;
        s * (s - 2.0)
    }

    fn degree(&self) -> usize {
        4
    }

    fn preimages(&self, z: ComplexPoint) -> Result<Vec<ComplexPoint>> {
        Ok(quartic_preimages(ensure_finite(z)?).to_vec())
    }

    fn fixed_point(&self) -> ComplexPoint {
        Complex64::new(0.0, 0.0)
    }

    // On |z| < 1/3: |R(z)| = |z|²|z² − 2| ≤ |z|·(1/3)(2 + 1/9) = (19/27)|z|.
    fn contraction_radius(&self) -> f64 {
        1.0 / 3.0
    }

    fn contraction_factor(&self) -> f64 {
        19.0 / 27.0
    }

    // On |z| ≥ 2: |R(z)| ≥ |z|²(|z|² − 2) ≥ 4|z|.
    fn escape_radius(&self) -> f64 {
        2.0
    }

    fn name(&self) -> &str {
        "z^4-2z^2"
    }
}

/// The four solutions of `ζ⁴ − 2ζ² = z`: `ζ² = 1 ± x` with `x = √(1+z)`,
/// principal branches throughout, sorted lexicographically.
pub fn quartic_preimages(z: ComplexPoint) -> [ComplexPoint; 4] {
    let x = (1.0 + z).sqrt();
    let plus = 1.0 + x;
    // 1 − x = −z/(1 + x) avoids cancellation near z = 0; 1 + x has
    // nonnegative real part at least 1, so it never vanishes.
    let minus = -z / plus;
    let a = plus.sqrt();
    let b = minus.sqrt();
    let mut roots = [a, -a, b, -b];
    sort_lexicographic(&mut roots);
    roots
}

/// `(|Σζ|, |Σζ² − 4|, |Σ 1·ζ|)` over the four preimages of `z`.
pub fn verify_juliarel(z: ComplexPoint) -> [f64; 3] {
    let roots = quartic_preimages(z);
    let sum: Complex64 = roots.iter().sum();
    let sum_sq: Complex64 = roots.iter().map(|r| r * r).sum();
    let mixed: Complex64 = roots.iter().map(|r| Complex64::new(1.0, 0.0) * r).sum();
    [sum.norm(), (sum_sq - 4.0).norm(), mixed.norm()]
}

/// Max `|R(ζ) − z|` over the preimages of `z`.
pub fn preimage_residual(z: ComplexPoint) -> f64 {
    quartic_preimages(z)
        .iter()
        .map(|&r| (JuliaMap.evaluate(r) - z).norm())
        .fold(0.0, f64::max)
}

pub fn julia_model(truncation: TruncationPolicy) -> ProductKernelModel {
    ProductKernelModel::new("julia", Arc::new(CauchyFactor), Arc::new(JuliaMap), truncation)
}

pub fn julia_kernel(z: ComplexPoint, w: ComplexPoint, truncation: TruncationPolicy) -> Result<KernelValue> {
    julia_model(truncation).eval_kernel(z, w)
}

/// `e₀ = 1`, `e₁ = z`, with the bilinear preimage-averaging adjoint.
pub fn julia_rep(truncation: TruncationPolicy) -> Representation {
    let family = SymbolFamily::new(AdjointVariant::Bilinear)
        .with_symbol("1", |_| Complex64::new(1.0, 0.0))
        .with_symbol("z", |z| z);
    Representation::new(family, Arc::new(julia_model(truncation)))
}

pub fn fatou_classify(z: ComplexPoint, max_steps: usize) -> Result<OrbitStatus> {
    Ok(classify_orbit(&JuliaMap, z, max_steps)?.status)
}
