//! Kernels of the unit disk: finite Blaschke products, the Takenaka–Malmquist
//! basis of the model space `H₂ ⊖ bH₂`, and the multiplicative
//! decompositions of the Szegő kernel `1/(1 − z·conj(w))` and the Bergman
//! kernel `1/(1 − z·conj(w))²`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::sync::Arc;

use crate::cuntz::{AdjointVariant, Representation, SymbolFamily};
use crate::iteration::{sort_lexicographic, IterationMap, Monomial};
use crate::kernel::{
    CauchyFactor, FactorKernel, KernelSection, ProductKernelModel, SquaredCauchyFactor,
    TruncationPolicy,
};
use crate::{ensure_finite, ComplexPoint, Error, Result};

const POLE_GUARD: f64 = 1e-15;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `b(z) = ∏ (z − wᵢ)/(1 − z·conj(wᵢ))` with all `|wᵢ| < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    zeros: Vec<ComplexPoint>,
}

impl BlaschkeProduct {
    pub fn new(zeros: Vec<ComplexPoint>) -> Result<Self> {
        if zeros.is_empty() {
            return Err(Error::invalid("Blaschke product needs at least one zero"));
        }
        for &w in &zeros {
            ensure_finite(w)?;
            if !(w.norm() < 1.0) {
                return Err(Error::invalid(format!("Blaschke zero {w} not in the open disk")));
            }
        }
        Ok(Self { zeros })
    }

    pub fn zeros(&self) -> &[ComplexPoint] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    fn factor(w: ComplexPoint, z: ComplexPoint) -> Result<Complex64> {
        let den = 1.0 - z * w.conj();
        if den.norm() <= POLE_GUARD {
            return Err(Error::Pole { point: z });
        }
        Ok((z - w) / den)
    }

    pub fn eval(&self, z: ComplexPoint) -> Result<Complex64> {
        let z = ensure_finite(z)?;
        self.zeros
            .iter()
            .try_fold(c(1.0), |acc, &w| Ok(acc * Self::factor(w, z)?))
    }

    /// Takenaka–Malmquist function `e_j`, `1 ≤ j ≤ N`:
    /// `√(1−|w_j|²)/(1 − conj(w_j) z) · ∏_{i<j} (z − wᵢ)/(1 − conj(wᵢ) z)`.
    pub fn model_basis_eval(&self, j: usize, z: ComplexPoint) -> Result<Complex64> {
        if j == 0 || j > self.zeros.len() {
            return Err(Error::IndexOutOfRange {
                index: j,
                count: self.zeros.len(),
            });
        }
        let z = ensure_finite(z)?;
        let wj = self.zeros[j - 1];
        let den = 1.0 - wj.conj() * z;
        if den.norm() <= POLE_GUARD {
            return Err(Error::Pole { point: z });
        }
        let head = (1.0 - wj.norm_sqr()).sqrt() / den;
        self.zeros[..j - 1]
            .iter()
            .try_fold(head, |acc, &w| Ok(acc * Self::factor(w, z)?))
    }

    /// `(1 − b(z)·conj(b(w)))/(1 − z·conj(w))`, the model-space kernel.
    pub fn model_kernel(&self, z: ComplexPoint, w: ComplexPoint) -> Result<Complex64> {
        let num = 1.0 - self.eval(z)? * self.eval(w)?.conj();
        Ok(num / (1.0 - z * w.conj()))
    }

    /// `Σᵢ eᵢ(z)·conj(eᵢ(w))`.
    pub fn basis_kernel(&self, z: ComplexPoint, w: ComplexPoint) -> Result<Complex64> {
        (1..=self.degree()).try_fold(c(0.0), |acc, j| {
            Ok(acc + self.model_basis_eval(j, z)? * self.model_basis_eval(j, w)?.conj())
        })
    }

    /// The basis as a symbol family; symbol `j` (0-based) is `e_{j+1}`.
    /// Symbols evaluate to NaN at a pole.
    pub fn symbol_family(&self, variant: AdjointVariant) -> SymbolFamily {
        (1..=self.degree()).fold(SymbolFamily::new(variant), |fam, j| {
            let b = self.clone();
            fam.with_symbol(format!("e{j}"), move |z| {
                b.model_basis_eval(j, z).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
            })
        })
    }

    /// Relative residual of
    /// `1/(1 − z·conj(w)) = (Σ eᵢ(z) conj(eᵢ(w))) / (1 − b(z)·conj(b(w)))`.
    pub fn verify_multi(&self, z: ComplexPoint, w: ComplexPoint) -> Result<f64> {
        if !(z.norm() < 1.0 && w.norm() < 1.0) {
            return Err(Error::invalid("verify_multi needs |z|, |w| < 1"));
        }
        let lhs = 1.0 / (1.0 - z * w.conj());
        let rhs = self.basis_kernel(z, w)? / (1.0 - self.eval(z)? * self.eval(w)?.conj());
        Ok((lhs - rhs).norm() / lhs.norm())
    }

    pub fn has_double_zero_at_origin(&self) -> bool {
        self.zeros.iter().filter(|w| w.norm() == 0.0).count() >= 2
    }

    /// Ordered so the origin zeros come first, as the product model needs.
    fn origin_first(&self) -> Self {
        let mut zeros = self.zeros.clone();
        zeros.sort_by_key(|w| w.norm() != 0.0);
        Self { zeros }
    }
}

/// `∏_{n=0}^{M} (1 + q^{2ⁿ})`, `q = z·conj(w)`.
pub fn szego_product(z: ComplexPoint, w: ComplexPoint, m: usize) -> Complex64 {
    let mut q = z * w.conj();
    let mut acc = c(1.0);
    for _ in 0..=m {
        acc *= 1.0 + q;
        q = q * q;
    }
    acc
}

/// `∏_{n=0}^{M} (1 + 2q^{2ⁿ} + q^{2ⁿ⁺¹})`, `q = z·conj(w)`.
pub fn bergman_product(z: ComplexPoint, w: ComplexPoint, m: usize) -> Complex64 {
    let mut q = z * w.conj();
    let mut acc = c(1.0);
    for _ in 0..=m {
        let q2 = q * q;
        acc *= 1.0 + 2.0 * q + q2;
        q = q2;
    }
    acc
}

/// A Blaschke product with at least two zeros at the origin, as a self-map
/// of the disk. `|b(z)| ≤ |z|²` gives the contraction certificate.
#[derive(Debug, Clone)]
pub struct BlaschkeMap {
    b: BlaschkeProduct,
    // Ascending coefficients of ∏(ζ − wᵢ) and ∏(1 − conj(wᵢ) ζ).
    numerator: Vec<Complex64>,
    denominator: Vec<Complex64>,
    name: String,
}

fn poly_mul(p: &[Complex64], q: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![c(0.0); p.len() + q.len() - 1];
    for (i, &a) in p.iter().enumerate() {
        for (j, &b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn poly_eval(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(c(0.0), |acc, &a| acc * z + a)
}

fn poly_derivative(p: &[Complex64]) -> Vec<Complex64> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &a)| a * k as f64)
        .collect()
}

impl BlaschkeMap {
    pub fn new(b: BlaschkeProduct) -> Result<Self> {
        if !b.has_double_zero_at_origin() {
            return Err(Error::invalid(
                "iterated Blaschke map needs at least two zeros at the origin",
            ));
        }
        let numerator = b
            .zeros
            .iter()
            .fold(vec![c(1.0)], |acc, &w| poly_mul(&acc, &[-w, c(1.0)]));
        let denominator = b
            .zeros
            .iter()
            .fold(vec![c(1.0)], |acc, &w| poly_mul(&acc, &[c(1.0), -w.conj()]));
        let name = format!("blaschke(deg {})", b.degree());
        Ok(Self {
            b,
            numerator,
            denominator,
            name,
        })
    }

    pub fn product(&self) -> &BlaschkeProduct {
        &self.b
    }
}

impl IterationMap for BlaschkeMap {
    fn evaluate(&self, z: ComplexPoint) -> ComplexPoint {
        self.b.eval(z).unwrap_or(Complex64::new(f64::INFINITY, f64::INFINITY))
    }

    fn degree(&self) -> usize {
        self.b.degree()
    }

    /// Roots of `∏(ζ − wᵢ) − z·∏(1 − conj(wᵢ)ζ)` from the companion matrix,
    /// polished by Newton steps.
    fn preimages(&self, z: ComplexPoint) -> Result<Vec<ComplexPoint>> {
        let n = self.b.degree();
        let poly: Vec<Complex64> = self
            .numerator
            .iter()
            .zip(&self.denominator)
            .map(|(&p, &q)| p - z * q)
            .collect();
        let lead = poly[n];
        if lead.norm() <= POLE_GUARD {
            return Err(Error::invalid("degenerate preimage polynomial"));
        }
        let mut companion = DMatrix::from_element(n, n, c(0.0));
        for i in 1..n {
            companion[(i, i - 1)] = c(1.0);
        }
        for i in 0..n {
            companion[(i, n - 1)] = -poly[i] / lead;
        }
        let eig = companion
            .eigenvalues()
            .ok_or_else(|| Error::invalid("companion eigenvalues did not converge"))?;
        let deriv = poly_derivative(&poly);
        let mut roots: Vec<Complex64> = eig
            .iter()
            .map(|&r0| {
                let mut r = r0;
                for _ in 0..3 {
                    let d = poly_eval(&deriv, r);
                    if d.norm() == 0.0 {
                        break;
                    }
                    let step = poly_eval(&poly, r) / d;
                    if !step.re.is_finite() || !step.im.is_finite() {
                        break;
                    }
                    r -= step;
                }
                r
            })
            .collect();
        sort_lexicographic(&mut roots);
        Ok(roots)
    }

    fn fixed_point(&self) -> ComplexPoint {
        c(0.0)
    }

    fn contraction_radius(&self) -> f64 {
        0.5
    }

    fn contraction_factor(&self) -> f64 {
        0.5
    }

    fn escape_radius(&self) -> f64 {
        1.0
    }

    fn name(&self) -> &str {
        &self.name
    }
}

/// `t(z,w) = Σ_{i≥2} eᵢ(z)·conj(eᵢ(w))` for a model-space basis with `e₁ ≡ 1`.
#[derive(Debug, Clone)]
pub struct BlaschkeFactor {
    b: BlaschkeProduct,
}

impl BlaschkeFactor {
    pub fn new(b: BlaschkeProduct) -> Result<Self> {
        if !b.has_double_zero_at_origin() {
            return Err(Error::invalid(
                "product factor needs at least two zeros at the origin",
            ));
        }
        Ok(Self { b: b.origin_first() })
    }
}

impl FactorKernel for BlaschkeFactor {
    fn t(&self, z: ComplexPoint, w: ComplexPoint) -> Complex64 {
        (2..=self.b.degree())
            .map(|j| {
                let ez = self.b.model_basis_eval(j, z);
                let ew = self.b.model_basis_eval(j, w);
                match (ez, ew) {
                    (Ok(a), Ok(b)) => a * b.conj(),
                    _ => Complex64::new(f64::NAN, f64::NAN),
                }
            })
            .sum()
    }

    // |e₂| = |z| and |eᵢ| ≤ √(1−|wᵢ|²)/(1−|wᵢ|ρ)·|z|² for i ≥ 3.
    fn diagonal_slope(&self, center: ComplexPoint, radius: f64) -> f64 {
        if center != c(0.0) {
            return f64::INFINITY;
        }
        let extra: f64 = self.b.zeros[2..]
            .iter()
            .map(|w| {
                let m = w.norm();
                (1.0 - m * m) / (1.0 - m * radius).powi(2)
            })
            .sum();
        (1.0 + radius * radius * extra).sqrt()
    }

    fn name(&self) -> &str {
        "blaschke model kernel"
    }
}

pub fn szego_model(truncation: TruncationPolicy) -> ProductKernelModel {
    ProductKernelModel::new(
        "szego",
        Arc::new(CauchyFactor),
        Arc::new(Monomial::new(2).expect("power 2")),
        truncation,
    )
}

pub fn bergman_model(truncation: TruncationPolicy) -> ProductKernelModel {
    ProductKernelModel::new(
        "bergman",
        Arc::new(SquaredCauchyFactor),
        Arc::new(Monomial::new(2).expect("power 2")),
        truncation,
    )
}

/// Product kernel `∏ₙ Σᵢ eᵢ(bₙz) conj(eᵢ(bₙw))`, equal to the Szegő kernel
/// when `b` has a double zero at the origin.
pub fn blaschke_model(b: &BlaschkeProduct, truncation: TruncationPolicy) -> Result<ProductKernelModel> {
    Ok(ProductKernelModel::new(
        "blaschke",
        Arc::new(BlaschkeFactor::new(b.clone())?),
        Arc::new(BlaschkeMap::new(b.clone())?),
        truncation,
    ))
}

/// `e = {1, z}` with `R = z²` on the Szegő kernel.
pub fn szego_rep(truncation: TruncationPolicy) -> Representation {
    let family = SymbolFamily::new(AdjointVariant::Sesquilinear)
        .with_symbol("1", |_| c(1.0))
        .with_symbol("z", |z| z);
    Representation::new(family, Arc::new(szego_model(truncation)))
}

/// `e = {1, √2·z, z²}`, the orthonormal basis for `k = (1 + z·conj(w))²`,
/// with `R = z²`. These operators do not satisfy the Cuntz relations.
pub fn bergman_rep(truncation: TruncationPolicy) -> Representation {
    let family = SymbolFamily::new(AdjointVariant::Sesquilinear)
        .with_symbol("1", |_| c(1.0))
        .with_symbol("sqrt2*z", |z| std::f64::consts::SQRT_2 * z)
        .with_symbol("z^2", |z| z * z);
    Representation::new(family, Arc::new(bergman_model(truncation)))
}

pub fn blaschke_rep(b: &BlaschkeProduct, truncation: TruncationPolicy) -> Result<Representation> {
    let model = blaschke_model(b, truncation)?;
    Ok(Representation::new(
        b.origin_first().symbol_family(AdjointVariant::Sesquilinear),
        Arc::new(model),
    ))
}

/// Szegő kernel `1/(1 − z·conj(w))`.
pub fn cauchy_kernel(z: ComplexPoint, w: ComplexPoint) -> Result<Complex64> {
    let den = 1.0 - z * w.conj();
    if den.norm() <= POLE_GUARD {
        return Err(Error::Pole { point: z });
    }
    Ok(1.0 / den)
}

/// Splitting of a finite Szegő-kernel combination `f = Σ aⱼ k_{wⱼ}` into
/// `f = Σᵢ eᵢ·(hᵢ ∘ b)` with `hᵢ = Σⱼ aⱼ conj(eᵢ(wⱼ)) k_{b(wⱼ)}`.
#[derive(Debug, Clone)]
pub struct DiskDecomposition {
    pub b: BlaschkeProduct,
    pub components: Vec<KernelSection>,
    /// `|Σ‖hᵢ‖² − ‖f‖²| / ‖f‖²` (0 when `f = 0`).
    pub parseval_residual: f64,
}

impl DiskDecomposition {
    /// `Σᵢ eᵢ(z)·hᵢ(b(z))`.
    pub fn reconstruct(&self, z: ComplexPoint) -> Result<Complex64> {
        let bz = self.b.eval(z)?;
        self.components
            .iter()
            .enumerate()
            .try_fold(c(0.0), |acc, (i, h)| {
                Ok(acc + self.b.model_basis_eval(i + 1, z)? * h.eval_with(cauchy_kernel, bz)?)
            })
    }
}

pub fn szego_decompose(b: &BlaschkeProduct, f: &KernelSection) -> Result<DiskDecomposition> {
    if f.is_empty() {
        return Err(Error::EmptySection);
    }
    for w in f.centers() {
        if !(w.norm() < 1.0) {
            return Err(Error::invalid(format!("kernel center {w} outside the disk")));
        }
    }
    let mut components = Vec::with_capacity(b.degree());
    for i in 1..=b.degree() {
        let mut terms = Vec::with_capacity(f.terms.len());
        for &(a, w) in &f.terms {
            terms.push((a * b.model_basis_eval(i, w)?.conj(), b.eval(w)?));
        }
        components.push(KernelSection::new(terms));
    }
    let f_norm = f.norm_sqr_with(cauchy_kernel)?;
    let parts: f64 = components
        .iter()
        .map(|h| h.norm_sqr_with(cauchy_kernel))
        .sum::<Result<f64>>()?;
    let parseval_residual = if f_norm == 0.0 {
        0.0
    } else {
        (parts - f_norm).abs() / f_norm
    };
    Ok(DiskDecomposition {
        b: b.clone(),
        components,
        parseval_residual,
    })
}

/// Bergman inner product of polynomials given by ascending coefficients,
/// with the normalized area measure: `‖zⁿ‖² = 1/(n+1)`.
pub fn bergman_inner(p: &[Complex64], q: &[Complex64]) -> Complex64 {
    p.iter()
        .zip(q)
        .enumerate()
        .map(|(n, (&a, &b))| a * b.conj() / (n as f64 + 1.0))
        .sum()
}

/// Coefficients of `eᵢ·eⱼ·(g ∘ b)` for `b = z²`, `e₁ = 1`, `e₂ = z`
/// (`i, j ∈ {1, 2}`), with `g` given by ascending coefficients.
pub fn bergman_component(i: usize, j: usize, g: &[Complex64]) -> Result<Vec<Complex64>> {
    if !(1..=2).contains(&i) || !(1..=2).contains(&j) {
        return Err(Error::IndexOutOfRange { index: i.max(j), count: 2 });
    }
    let shift = (i - 1) + (j - 1);
    let mut out = vec![c(0.0); shift + 2 * g.len()];
    for (n, &a) in g.iter().enumerate() {
        out[shift + 2 * n] = a;
    }
    Ok(out)
}
