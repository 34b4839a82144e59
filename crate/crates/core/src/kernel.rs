//! Product kernels `K(z,w) = ∏ₙ k(Rₙz, Rₙw)` with `k = 1 + t`.
//!
//! Truncation is certified: with `sₙ = √t(Rₙz,Rₙz)·√t(Rₙw,Rₙw)` the
//! Cauchy–Schwarz bound `|t(Rₙz,Rₙw)| ≤ sₙ` gives
//!
//! ```text
//! |K / K_M − 1| ≤ ∏_{n>M} (1 + sₙ) − 1,
//! ```
//!
//! where `K_M` is the product of the first `M + 1` factors. Terms up to
//! `N_max` are taken from the computed orbits; beyond `N_max` the
//! contraction certificate of the map bounds them geometrically.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::sync::Arc;

use crate::iteration::{classify_orbit, IterationMap, OrbitStatus};
use crate::{ensure_finite, ComplexPoint, Error, Result};

/// The factor `k(z,w) = 1 + t(z,w)` with `t` positive definite.
pub trait FactorKernel: Send + Sync {
    fn t(&self, z: ComplexPoint, w: ComplexPoint) -> Complex64;

    fn k(&self, z: ComplexPoint, w: ComplexPoint) -> Complex64 {
        1.0 + self.t(z, w)
    }

    /// A constant `L` with `√t(z,z) ≤ L·|z − center|` whenever
    /// `|z − center| ≤ radius`. Infinite if no such constant exists.
    fn diagonal_slope(&self, center: ComplexPoint, radius: f64) -> f64;

    fn name(&self) -> &str;
}

/// `t(z,w) = z·conj(w)`, so `k` is `1 + z·conj(w)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CauchyFactor;

impl FactorKernel for CauchyFactor {
    fn t(&self, z: ComplexPoint, w: ComplexPoint) -> Complex64 {
        z * w.conj()
    }

    fn diagonal_slope(&self, center: ComplexPoint, _radius: f64) -> f64 {
        if center == Complex64::new(0.0, 0.0) {
            1.0
        } else {
            f64::INFINITY
        }
    }

    fn name(&self) -> &str {
        "1+z*conj(w)"
    }
}

/// `t(z,w) = 2q + q²` with `q = z·conj(w)`, so `k = (1 + z·conj(w))²`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SquaredCauchyFactor;

impl FactorKernel for SquaredCauchyFactor {
    fn t(&self, z: ComplexPoint, w: ComplexPoint) -> Complex64 {
        let q = z * w.conj();
        2.0 * q + q * q
    }

    // √(2|z|² + |z|⁴) = |z|·√(2 + |z|²).
    fn diagonal_slope(&self, center: ComplexPoint, radius: f64) -> f64 {
        if center == Complex64::new(0.0, 0.0) {
            (2.0 + radius * radius).sqrt()
        } else {
            f64::INFINITY
        }
    }

    fn name(&self) -> &str {
        "(1+z*conj(w))^2"
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub max_factors: usize,
    pub tail_tolerance: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            max_factors: 256,
            tail_tolerance: 1e-12,
        }
    }
}

impl TruncationPolicy {
    pub fn new(max_factors: usize, tail_tolerance: f64) -> Result<Self> {
        if max_factors < 1 {
            return Err(Error::invalid("max_factors must be at least 1"));
        }
        if !(tail_tolerance > 0.0) {
            return Err(Error::invalid("tail_tolerance must be positive"));
        }
        Ok(Self {
            max_factors,
            tail_tolerance,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: Complex64,
    pub factors_used: usize,
    /// Certified relative bound on the omitted tail.
    pub tail_bound: f64,
    /// Index of an exactly vanishing factor, if one was hit.
    pub zero_factor: Option<usize>,
}

/// The orbit of one point, precomputed for repeated kernel evaluations.
#[derive(Debug, Clone)]
pub struct KernelOrbit {
    base: ComplexPoint,
    /// `R_0 z, …, R_{N_max} z`.
    points: Vec<ComplexPoint>,
    /// `√t(Rₙz, Rₙz)`.
    sqrt_diag: Vec<f64>,
    /// `|R_{N_max} z − ℓ|`.
    final_radius: f64,
}

impl KernelOrbit {
    pub fn base(&self) -> ComplexPoint {
        self.base
    }

    pub fn points(&self) -> &[ComplexPoint] {
        &self.points
    }
}

#[derive(Debug, Clone)]
pub struct GramReport {
    pub matrix: DMatrix<Complex64>,
    pub min_eigenvalue: f64,
    pub trace: f64,
    pub psd: bool,
}

/// Relative PSD tolerance used by [`ProductKernelModel::gram_matrix`].
pub const GRAM_PSD_TOLERANCE: f64 = 1e-8;

#[derive(Clone)]
pub struct ProductKernelModel {
    name: String,
    factor: Arc<dyn FactorKernel>,
    map: Arc<dyn IterationMap>,
    truncation: TruncationPolicy,
    normalization: f64,
}

impl std::fmt::Debug for ProductKernelModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProductKernelModel")
            .field("name", &self.name)
            .field("factor", &self.factor.name())
            .field("map", &self.map.name())
            .field("truncation", &self.truncation)
            .field("normalization", &self.normalization)
            .finish()
    }
}

impl ProductKernelModel {
    pub fn new(
        name: impl Into<String>,
        factor: Arc<dyn FactorKernel>,
        map: Arc<dyn IterationMap>,
        truncation: TruncationPolicy,
    ) -> Self {
        Self {
            name: name.into(),
            factor,
            map,
            truncation,
            normalization: 1.0,
        }
    }

    /// Multiply every kernel value by `K(ℓ,ℓ)`. The shipped models all use 1.
    pub fn with_normalization(mut self, value_at_fixed_point: f64) -> Result<Self> {
        if !(value_at_fixed_point > 0.0) || !value_at_fixed_point.is_finite() {
            return Err(Error::invalid("K(l,l) must be positive and finite"));
        }
        self.normalization = value_at_fixed_point;
        Ok(self)
    }

    pub fn with_truncation(mut self, truncation: TruncationPolicy) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn factor(&self) -> &dyn FactorKernel {
        self.factor.as_ref()
    }

    pub fn map(&self) -> &dyn IterationMap {
        self.map.as_ref()
    }

    pub fn map_arc(&self) -> Arc<dyn IterationMap> {
        Arc::clone(&self.map)
    }

    pub fn truncation(&self) -> TruncationPolicy {
        self.truncation
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Orbit of `z` through `N_max` steps, or a domain error if `z` does not
    /// reach the contraction disk within that budget.
    pub fn orbit(&self, z: ComplexPoint) -> Result<KernelOrbit> {
        let z = ensure_finite(z)?;
        let n_max = self.truncation.max_factors;
        let report = classify_orbit(self.map.as_ref(), z, n_max)?;
        if report.status != OrbitStatus::Converged {
            return Err(Error::Domain {
                point: z,
                status: report.status,
            });
        }
        let mut points = report.points;
        let mut w = *points.last().unwrap();
        while points.len() <= n_max {
            w = self.map.evaluate(w);
            points.push(w);
        }
        let sqrt_diag = points
            .iter()
            .map(|&p| self.factor.t(p, p).re.max(0.0).sqrt())
            .collect();
        let final_radius = (points[n_max] - self.map.fixed_point()).norm();
        Ok(KernelOrbit {
            base: z,
            points,
            sqrt_diag,
            final_radius,
        })
    }

    // Σ_{n > N_max} sₙ, bounded through the contraction certificate.
    fn remainder(&self, a: &KernelOrbit, b: &KernelOrbit) -> f64 {
        let c = self.map.contraction_factor();
        let slope = self
            .factor
            .diagonal_slope(self.map.fixed_point(), self.map.contraction_radius());
        let rr = a.final_radius * b.final_radius;
        if rr == 0.0 {
            return 0.0;
        }
        slope * slope * rr * c * c / (1.0 - c * c)
    }

    // suffix[m] = Σ_{n=m}^{N_max} ln(1 + sₙ); length N_max + 2.
    fn suffix_log_sums(&self, a: &KernelOrbit, b: &KernelOrbit) -> Vec<f64> {
        let n_max = self.truncation.max_factors;
        let mut suffix = vec![0.0; n_max + 2];
        for n in (0..=n_max).rev() {
            suffix[n] = suffix[n + 1] + (a.sqrt_diag[n] * b.sqrt_diag[n]).ln_1p();
        }
        suffix
    }

    /// `K(z,w)` from precomputed orbits.
    pub fn eval_orbits(&self, a: &KernelOrbit, b: &KernelOrbit) -> Result<KernelValue> {
        let n_max = self.truncation.max_factors;
        let eps = self.truncation.tail_tolerance;
        let rem = self.remainder(a, b);
        let suffix = self.suffix_log_sums(a, b);
        let (last, tail) = (0..n_max)
            .map(|m| (m, (suffix[m + 1] + rem).exp_m1()))
            .find(|&(_, tail)| tail < eps)
            .ok_or(Error::Budget {
                what: "kernel truncation",
                limit: n_max,
            })?;

        let mut value = Complex64::new(self.normalization, 0.0);
        for n in 0..=last {
            let factor = self.factor.k(a.points[n], b.points[n]);
            if factor == Complex64::new(0.0, 0.0) {
                return Ok(KernelValue {
                    value: factor,
                    factors_used: n + 1,
                    tail_bound: 0.0,
                    zero_factor: Some(n),
                });
            }
            value *= factor;
        }
        Ok(KernelValue {
            value,
            factors_used: last + 1,
            tail_bound: tail,
            zero_factor: None,
        })
    }

    pub fn eval_kernel(&self, z: ComplexPoint, w: ComplexPoint) -> Result<KernelValue> {
        let a = self.orbit(z)?;
        let b = if z == w { a.clone() } else { self.orbit(w)? };
        self.eval_orbits(&a, &b)
    }

    /// Shorthand for the kernel value alone.
    pub fn kernel(&self, z: ComplexPoint, w: ComplexPoint) -> Result<Complex64> {
        Ok(self.eval_kernel(z, w)?.value)
    }

    /// `∏_{n=M+1}^{N_max}(1 + sₙ) − 1`, widened by the certified remainder
    /// beyond `N_max`.
    pub fn tail_bound(&self, z: ComplexPoint, w: ComplexPoint, m: usize) -> Result<f64> {
        let a = self.orbit(z)?;
        let b = self.orbit(w)?;
        let rem = self.remainder(&a, &b);
        let suffix = self.suffix_log_sums(&a, &b);
        let start = (m + 1).min(suffix.len() - 1);
        Ok((suffix[start] + rem).exp_m1())
    }

    /// `|K(z,w) − k(z,w)·K(Rz,Rw)| / max(1, |K(z,w)|)`.
    pub fn verify_recursion(&self, z: ComplexPoint, w: ComplexPoint) -> Result<f64> {
        let lhs = self.kernel(z, w)?;
        let rz = self.map.evaluate(z);
        let rw = self.map.evaluate(w);
        let rhs = self.factor.k(z, w) * self.kernel(rz, rw)?;
        Ok((lhs - rhs).norm() / lhs.norm().max(1.0))
    }

    pub fn gram_matrix(&self, points: &[ComplexPoint]) -> Result<GramReport> {
        self.gram_matrix_with_tolerance(points, GRAM_PSD_TOLERANCE)
    }

    /// Hermitian Gram matrix `Gᵢⱼ = K(zᵢ, zⱼ)` and its PSD test
    /// `λ_min ≥ −tol·trace`. Entries are computed in parallel; the result
    /// does not depend on scheduling.
    pub fn gram_matrix_with_tolerance(
        &self,
        points: &[ComplexPoint],
        tol: f64,
    ) -> Result<GramReport> {
        let n = points.len();
        let orbits: Vec<KernelOrbit> = points
            .par_iter()
            .enumerate()
            .map(|(i, &z)| {
                self.orbit(z).map_err(|e| Error::GramEntry {
                    i,
                    j: i,
                    source: Box::new(e),
                })
            })
            .collect::<Result<_>>()?;

        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let values: Vec<Complex64> = pairs
            .par_iter()
            .map(|&(i, j)| {
                self.eval_orbits(&orbits[i], &orbits[j])
                    .map(|v| v.value)
                    .map_err(|e| Error::GramEntry {
                        i,
                        j,
                        source: Box::new(e),
                    })
            })
            .collect::<Result<_>>()?;

        let mut matrix = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for (&(i, j), &v) in pairs.iter().zip(&values) {
            if i == j {
                matrix[(i, i)] = Complex64::new(v.re, 0.0);
            } else {
                matrix[(i, j)] = v;
                matrix[(j, i)] = v.conj();
            }
        }
        let trace: f64 = (0..n).map(|i| matrix[(i, i)].re).sum();
        let min_eigenvalue = if n == 0 {
            0.0
        } else {
            matrix
                .clone()
                .symmetric_eigenvalues()
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min)
        };
        Ok(GramReport {
            psd: min_eigenvalue >= -tol * trace,
            matrix,
            min_eigenvalue,
            trace,
        })
    }
}

/// A finite combination `Σ aᵢ K(·, wᵢ)` of kernel sections.
///
/// The section itself carries no kernel; evaluation and inner products take
/// one explicitly so the same type serves the product kernels and the
/// half-plane and disk Cauchy kernels.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KernelSection {
    pub terms: Vec<(Complex64, ComplexPoint)>,
}

impl KernelSection {
    pub fn new(terms: Vec<(Complex64, ComplexPoint)>) -> Self {
        Self { terms }
    }

    pub fn single(coefficient: Complex64, center: ComplexPoint) -> Self {
        Self {
            terms: vec![(coefficient, center)],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn centers(&self) -> impl Iterator<Item = ComplexPoint> + '_ {
        self.terms.iter().map(|&(_, w)| w)
    }

    /// `Σ aᵢ kernel(z, wᵢ)`.
    pub fn eval_with<F>(&self, kernel: F, z: ComplexPoint) -> Result<Complex64>
    where
        F: Fn(ComplexPoint, ComplexPoint) -> Result<Complex64>,
    {
        self.terms
            .iter()
            .try_fold(Complex64::new(0.0, 0.0), |acc, &(a, w)| {
                Ok(acc + a * kernel(z, w)?)
            })
    }

    /// `⟨self, other⟩ = Σᵢⱼ aᵢ conj(bⱼ) kernel(vⱼ, wᵢ)` via the reproducing
    /// property `⟨K_w, K_v⟩ = K(v, w)`.
    pub fn inner_with<F>(&self, other: &KernelSection, kernel: F) -> Result<Complex64>
    where
        F: Fn(ComplexPoint, ComplexPoint) -> Result<Complex64>,
    {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(a, w) in &self.terms {
            for &(b, v) in &other.terms {
                acc += a * b.conj() * kernel(v, w)?;
            }
        }
        Ok(acc)
    }

    pub fn norm_sqr_with<F>(&self, kernel: F) -> Result<f64>
    where
        F: Fn(ComplexPoint, ComplexPoint) -> Result<Complex64>,
    {
        Ok(self.inner_with(self, kernel)?.re)
    }

    pub fn eval(&self, model: &ProductKernelModel, z: ComplexPoint) -> Result<Complex64> {
        self.eval_with(|z, w| model.kernel(z, w), z)
    }
}
