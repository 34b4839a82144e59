//! The Hardy space of the right half-plane and finite-dimensional de Branges
//! `L(φ)` spaces.
//!
//! A rational Herglotz function with finitely many jumps is written
//!
//! ```text
//! φ(z) = a + b·z − i·Σⱼ mⱼ/(tⱼ − i·z),    a ∈ iℝ, b ≥ 0, mⱼ > 0, tⱼ ∈ ℝ,
//! ```
//!
//! so that with `a = b = 0` and `eⱼ(z) = √mⱼ/(tⱼ − i·z)`,
//! `(φ(z) + conj(φ(w)))/(z + conj(w)) = Σⱼ eⱼ(z)·conj(eⱼ(w))` holds exactly.
//! In these coordinates `φ(z) = 1/z` is the single jump `m = 1, t = 0`.
//!
//! Half-plane Cauchy kernels are `k_w(z) = 1/(z + conj(w))`; their Gram
//! matrix `⟨k_w, k_v⟩ = 1/(v + conj(w))` gives all norms used here.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::kernel::KernelSection;
use crate::{ensure_finite, ComplexPoint, Error, Result};

const GUARD: f64 = 1e-15;
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default Hardy truncation for the `paris` expansion.
pub const DEFAULT_HARDY_TERMS: usize = 300;

fn ensure_right(z: ComplexPoint) -> Result<ComplexPoint> {
    let z = ensure_finite(z)?;
    if z.re > 0.0 {
        Ok(z)
    } else {
        Err(Error::HalfPlane { point: z })
    }
}

fn ensure_off_axis(z: ComplexPoint) -> Result<ComplexPoint> {
    let z = ensure_finite(z)?;
    if z.re != 0.0 {
        Ok(z)
    } else {
        Err(Error::invalid(format!("{z} lies on the imaginary axis")))
    }
}

/// `t_n(z) = (1/√π)·(1/(z+1))·((z−1)/(z+1))ⁿ`, orthonormal in `H₂(ℂ₊)`.
pub fn hardy_basis(n: usize, z: ComplexPoint) -> Result<Complex64> {
    let z = ensure_right(z)?;
    let ratio = (z - 1.0) / (z + 1.0);
    Ok(ratio.powi(n as i32) / ((z + 1.0) * PI.sqrt()))
}

/// `Σ_{n=0}^{M} t_n(z)·conj(t_n(w))`.
pub fn hardy_kernel_partial(z: ComplexPoint, w: ComplexPoint, m: usize) -> Result<Complex64> {
    let z = ensure_right(z)?;
    let w = ensure_right(w)?;
    let rz = (z - 1.0) / (z + 1.0);
    let rw = ((w - 1.0) / (w + 1.0)).conj();
    let q = rz * rw;
    let mut term = 1.0 / (PI * (z + 1.0) * (w + 1.0).conj());
    let mut acc = Complex64::new(0.0, 0.0);
    for _ in 0..=m {
        acc += term;
        term *= q;
    }
    Ok(acc)
}

/// `1/(2π(z + conj(w)))`.
pub fn hardy_kernel(z: ComplexPoint, w: ComplexPoint) -> Result<Complex64> {
    let z = ensure_right(z)?;
    let w = ensure_right(w)?;
    Ok(1.0 / (2.0 * PI * (z + w.conj())))
}

/// `|(z − 1)/(z + 1)|`, the per-term decay of the Hardy expansion at `z`.
pub fn hardy_ratio(z: ComplexPoint) -> f64 {
    ((z - 1.0) / (z + 1.0)).norm()
}

/// `|Σ_{n>M} t_n(z) conj(t_n(w))| ≤ q^{M+1} / (π|z+1||w+1|(1 − q))`, `q` the
/// product of the two Hardy ratios.
pub fn hardy_tail_bound(z: ComplexPoint, w: ComplexPoint, m: usize) -> f64 {
    let q = hardy_ratio(z) * hardy_ratio(w);
    if q >= 1.0 {
        return f64::INFINITY;
    }
    q.powi(m as i32 + 1) / (PI * (z + 1.0).norm() * (w + 1.0).norm() * (1.0 - q))
}

/// Half-plane Cauchy kernel `1/(z + conj(w))`.
pub fn halfplane_cauchy(z: ComplexPoint, w: ComplexPoint) -> Result<Complex64> {
    let s = z + w.conj();
    if s.norm() <= GUARD {
        return Err(Error::SingularQuotient { z, w });
    }
    Ok(1.0 / s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HerglotzModel {
    /// `a = i·a_imag`.
    a_imag: f64,
    b: f64,
    masses: Vec<f64>,
    poles: Vec<f64>,
}

impl HerglotzModel {
    pub fn new(a_imag: f64, b: f64, masses: Vec<f64>, poles: Vec<f64>) -> Result<Self> {
        if !a_imag.is_finite() || !(b >= 0.0) || !b.is_finite() {
            return Err(Error::invalid("need a purely imaginary a and finite b >= 0"));
        }
        if masses.len() != poles.len() {
            return Err(Error::invalid("masses and poles differ in length"));
        }
        if masses.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
            return Err(Error::invalid("masses must be positive and finite"));
        }
        if poles.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("poles must be finite"));
        }
        for (i, t) in poles.iter().enumerate() {
            if poles[..i].contains(t) {
                return Err(Error::invalid(format!("duplicate pole {t}")));
            }
        }
        Ok(Self {
            a_imag,
            b,
            masses,
            poles,
        })
    }

    /// The `a = b = 0` model with the given jumps.
    pub fn jumps(masses: Vec<f64>, poles: Vec<f64>) -> Result<Self> {
        Self::new(0.0, 0.0, masses, poles)
    }

    /// `φ(z) = 1/z`.
    pub fn reciprocal() -> Self {
        Self::jumps(vec![1.0], vec![0.0]).expect("valid single jump")
    }

    pub fn count(&self) -> usize {
        self.masses.len()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn poles(&self) -> &[f64] {
        &self.poles
    }

    pub fn is_pure(&self) -> bool {
        self.a_imag == 0.0 && self.b == 0.0
    }

    fn require_pure(&self) -> Result<()> {
        if self.is_pure() {
            Ok(())
        } else {
            Err(Error::invalid("this operation needs a = b = 0"))
        }
    }

    fn denominator(&self, j: usize, z: ComplexPoint) -> Result<Complex64> {
        let d = self.poles[j] - I * z;
        if d.norm() <= GUARD {
            return Err(Error::Pole { point: z });
        }
        Ok(d)
    }

    pub fn phi(&self, z: ComplexPoint) -> Result<Complex64> {
        let z = ensure_finite(z)?;
        let mut acc = I * self.a_imag + self.b * z;
        for (j, &m) in self.masses.iter().enumerate() {
            acc -= I * m / self.denominator(j, z)?;
        }
        Ok(acc)
    }

    /// `e_j(z) = √m_j/(t_j − i·z)` for `1 ≤ j ≤ N`.
    pub fn basis_eval(&self, j: usize, z: ComplexPoint) -> Result<Complex64> {
        if j == 0 || j > self.count() {
            return Err(Error::IndexOutOfRange {
                index: j,
                count: self.count(),
            });
        }
        let z = ensure_finite(z)?;
        Ok(self.masses[j - 1].sqrt() / self.denominator(j - 1, z)?)
    }

    fn basis_all(&self, z: ComplexPoint) -> Result<Vec<Complex64>> {
        (1..=self.count()).map(|j| self.basis_eval(j, z)).collect()
    }

    /// Sum form `b + Σ e_n(z)·conj(e_n(w))`, valid off the imaginary axis.
    pub fn lphi_kernel(&self, z: ComplexPoint, w: ComplexPoint) -> Result<Complex64> {
        let z = ensure_off_axis(z)?;
        let w = ensure_off_axis(w)?;
        let ez = self.basis_all(z)?;
        let ew = self.basis_all(w)?;
        Ok(ez
            .iter()
            .zip(&ew)
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
            + self.b)
    }

    /// Quotient form `(φ(z) + conj(φ(w)))/(z + conj(w))`.
    pub fn lphi_kernel_quotient(&self, z: ComplexPoint, w: ComplexPoint) -> Result<Complex64> {
        let z = ensure_off_axis(z)?;
        let w = ensure_off_axis(w)?;
        let s = z + w.conj();
        if s.norm() <= GUARD {
            return Err(Error::SingularQuotient { z, w });
        }
        Ok((self.phi(z)? + self.phi(w)?.conj()) / s)
    }

    /// Max `|⟨e_j, e_k⟩ − δ_jk|` in `L(φ)`, each `e_j` expanded in the kernel
    /// sections at the `N` probe points; inner products by reproduction.
    pub fn verify_phi2(&self, probes: &[ComplexPoint]) -> Result<f64> {
        self.require_pure()?;
        let n = self.count();
        if probes.len() != n {
            return Err(Error::invalid(format!(
                "need exactly {n} probe points, got {}",
                probes.len()
            )));
        }
        // gram[(b, a)] = K(p_b, p_a) = ⟨K_{p_a}, K_{p_b}⟩
        let mut gram = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for b in 0..n {
            for a in 0..n {
                gram[(b, a)] = self.lphi_kernel(probes[b], probes[a])?;
            }
        }
        let svd = gram.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if !(smin > 1e-12 * smax) {
            return Err(Error::RankDeficient);
        }
        let values: Vec<Vec<Complex64>> = probes
            .iter()
            .map(|&p| self.basis_all(p))
            .collect::<Result<_>>()?;
        let lu = gram.lu();
        let coeffs: Vec<DVector<Complex64>> = (0..n)
            .map(|j| {
                let rhs = DVector::from_iterator(n, values.iter().map(|row| row[j]));
                lu.solve(&rhs).ok_or(Error::RankDeficient)
            })
            .collect::<Result<_>>()?;
        // ⟨e_j, e_k⟩ = Σ_c conj(x^k_c) e_j(p_c)
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in 0..n {
                let inner: Complex64 = (0..n).map(|c| coeffs[k][c].conj() * values[c][j]).sum();
                let delta = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((inner - delta).norm());
            }
        }
        Ok(worst)
    }

    /// `1/(φ(z) + conj(φ(w)))` through `M_t + 1` Hardy terms:
    /// `2π Σ_{m ≤ M_t} t_m(φ(z)) conj(t_m(φ(w)))`.
    pub fn phi_kernel_partial(&self, z: ComplexPoint, w: ComplexPoint, m: usize) -> Result<Complex64> {
        Ok(2.0 * PI * hardy_kernel_partial(self.phi(z)?, self.phi(w)?, m)?)
    }

    /// Relative residual of
    /// `Σ_n e_n(z)·[2π Σ_{m ≤ M_t} t_m(φ(z)) conj(t_m(φ(w)))]·conj(e_n(w))`
    /// against `1/(z + conj(w))`.
    pub fn verify_paris(&self, z: ComplexPoint, w: ComplexPoint, hardy_terms: usize) -> Result<f64> {
        self.require_pure()?;
        let z = ensure_right(z)?;
        let w = ensure_right(w)?;
        let inner = self.phi_kernel_partial(z, w, hardy_terms)?;
        let outer = self.lphi_kernel(z, w)?;
        let exact = halfplane_cauchy(z, w)?;
        Ok((outer * inner - exact).norm() / exact.norm())
    }

    /// Certified relative bound on the residual of [`verify_paris`] from the
    /// omitted Hardy terms.
    ///
    /// [`verify_paris`]: HerglotzModel::verify_paris
    pub fn paris_tail_bound(&self, z: ComplexPoint, w: ComplexPoint, hardy_terms: usize) -> Result<f64> {
        let (u, v) = (self.phi(z)?, self.phi(w)?);
        let outer = self.lphi_kernel(z, w)?.norm();
        let exact = halfplane_cauchy(z, w)?.norm();
        Ok(2.0 * PI * outer * hardy_tail_bound(u, v, hardy_terms) / exact)
    }

    /// `C_j* k_w = conj(e_j(w))·k_{φ(w)}`, returned as `(coefficient, center)`.
    pub fn apply_c_star_on_kernel(&self, j: usize, w: ComplexPoint) -> Result<(Complex64, ComplexPoint)> {
        self.require_pure()?;
        let w = ensure_right(w)?;
        let center = ensure_right(self.phi(w)?)?;
        Ok((self.basis_eval(j, w)?.conj(), center))
    }

    /// `(C_j g)(z) = e_j(z)·g(φ(z))`.
    pub fn apply_c<F>(&self, j: usize, g: F, z: ComplexPoint) -> Result<Complex64>
    where
        F: Fn(ComplexPoint) -> Result<Complex64>,
    {
        Ok(self.basis_eval(j, z)? * g(self.phi(z)?)?)
    }

    /// Relative residual of `Σ_j (C_j C_j* k_w)(z) = k_w(z)` with each
    /// `k_{φ(w)}(φ(z))` taken from the truncated Hardy expansion.
    pub fn verify_c_sum(&self, z: ComplexPoint, w: ComplexPoint, hardy_terms: usize) -> Result<f64> {
        let z = ensure_right(z)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 1..=self.count() {
            let (coef, center) = self.apply_c_star_on_kernel(j, w)?;
            let g = |u: ComplexPoint| Ok(coef * 2.0 * PI * hardy_kernel_partial(u, center, hardy_terms)?);
            acc += self.apply_c(j, g, z)?;
        }
        let exact = halfplane_cauchy(z, w)?;
        Ok((acc - exact).norm() / exact.norm())
    }

    /// Min of `Re φ` over the sampled right-half-plane points.
    pub fn min_real_part(&self, samples: &[ComplexPoint]) -> Result<f64> {
        samples
            .iter()
            .map(|&z| Ok(self.phi(ensure_right(z)?)?.re))
            .try_fold(f64::INFINITY, |acc, v: Result<f64>| Ok(acc.min(v?)))
    }
}

/// `f = Σ_n e_n·(h_n ∘ φ)` for a finite half-plane kernel combination
/// `f = Σ aⱼ k_{wⱼ}`, with `h_n = Σⱼ aⱼ conj(e_n(wⱼ)) k_{φ(wⱼ)}`.
#[derive(Debug, Clone)]
pub struct HalfPlaneDecomposition {
    pub model: HerglotzModel,
    pub components: Vec<KernelSection>,
    /// `|Σ‖h_n‖² − ‖f‖²| / ‖f‖²` (0 when `f = 0`).
    pub parseval_residual: f64,
}

impl HalfPlaneDecomposition {
    /// `Σ_n e_n(z)·h_n(φ(z))`.
    pub fn reconstruct(&self, z: ComplexPoint) -> Result<Complex64> {
        let u = self.model.phi(z)?;
        self.components
            .iter()
            .enumerate()
            .try_fold(Complex64::new(0.0, 0.0), |acc, (n, h)| {
                Ok(acc + self.model.basis_eval(n + 1, z)? * h.eval_with(halfplane_cauchy, u)?)
            })
    }
}

pub fn hardy_decompose(f: &KernelSection, model: &HerglotzModel) -> Result<HalfPlaneDecomposition> {
    model.require_pure()?;
    if f.is_empty() {
        return Err(Error::EmptySection);
    }
    for w in f.centers() {
        ensure_right(w)?;
    }
    let mut components = Vec::with_capacity(model.count());
    for n in 1..=model.count() {
        let terms = f
            .terms
            .iter()
            .map(|&(a, w)| Ok((a * model.basis_eval(n, w)?.conj(), ensure_right(model.phi(w)?)?)))
            .collect::<Result<_>>()?;
        components.push(KernelSection::new(terms));
    }
    let f_norm = f.norm_sqr_with(halfplane_cauchy)?;
    let parts: f64 = components
        .iter()
        .map(|h| h.norm_sqr_with(halfplane_cauchy))
        .sum::<Result<f64>>()?;
    let parseval_residual = if f_norm == 0.0 {
        0.0
    } else {
        (parts - f_norm).abs() / f_norm
    };
    Ok(HalfPlaneDecomposition {
        model: model.clone(),
        components,
        parseval_residual,
    })
}
