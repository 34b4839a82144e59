//! The weighted composition operators `(S_j f)(z) = e_j(z)·f(R(z))` on a
//! product-kernel space, their adjoints, and residual checks for the Cuntz
//! relations `S_i* S_j = δᵢⱼ I` and `Σ_j S_j S_j* = I`.
//!
//! Two adjoint routes are provided and cross-checked against each other:
//!
//! * on kernel sections, `S_j* K_w = conj(e_j(w)) K_{R(w)}`;
//! * on arbitrary functions, preimage averaging
//!   `(S_j* f)(z) = (1/n(z)) Σ_{R(ζ)=z} σ(e_j(ζ)) f(ζ)`, with `σ` conjugation
//!   ([`AdjointVariant::Sesquilinear`]) or the identity
//!   ([`AdjointVariant::Bilinear`]).

use num_complex::Complex64;
use serde::Serialize;
use std::fmt;
use std::sync::Arc;

use crate::iteration::IterationMap;
use crate::kernel::{FactorKernel, KernelOrbit, KernelSection, ProductKernelModel};
use crate::{ComplexPoint, Error, Result};

pub type SymbolFn = Arc<dyn Fn(ComplexPoint) -> Complex64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AdjointVariant {
    /// `(1/n) Σ e_j(ζ) conj(e_k(ζ)) = δ_jk`.
    Sesquilinear,
    /// `(1/n) Σ e_j(ζ) e_k(ζ) = δ_jk`.
    Bilinear,
}

impl AdjointVariant {
    fn apply(self, v: Complex64) -> Complex64 {
        match self {
            AdjointVariant::Sesquilinear => v.conj(),
            AdjointVariant::Bilinear => v,
        }
    }
}

/// An orthonormal basis `e_0, …, e_{N−1}` of `H(k)`, so that
/// `k(z,w) = Σ_j e_j(z) conj(e_j(w))`.
#[derive(Clone)]
pub struct SymbolFamily {
    names: Vec<String>,
    symbols: Vec<SymbolFn>,
    variant: AdjointVariant,
}

impl fmt::Debug for SymbolFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolFamily")
            .field("symbols", &self.names)
            .field("variant", &self.variant)
            .finish()
    }
}

impl SymbolFamily {
    pub fn new(variant: AdjointVariant) -> Self {
        Self {
            names: Vec::new(),
            symbols: Vec::new(),
            variant,
        }
    }

    pub fn with_symbol<F>(mut self, name: impl Into<String>, e: F) -> Self
    where
        F: Fn(ComplexPoint) -> Complex64 + Send + Sync + 'static,
    {
        self.names.push(name.into());
        self.symbols.push(Arc::new(e));
        self
    }

    pub fn with_variant(mut self, variant: AdjointVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn count(&self) -> usize {
        self.symbols.len()
    }

    pub fn variant(&self) -> AdjointVariant {
        self.variant
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn symbol(&self, j: usize) -> Result<&SymbolFn> {
        self.symbols.get(j).ok_or(Error::IndexOutOfRange {
            index: j,
            count: self.symbols.len(),
        })
    }

    pub fn eval(&self, j: usize, z: ComplexPoint) -> Result<Complex64> {
        Ok(self.symbol(j)?(z))
    }

    /// `Σ_j e_j(z) conj(e_j(w))`.
    pub fn reproduce(&self, z: ComplexPoint, w: ComplexPoint) -> Complex64 {
        self.symbols.iter().map(|e| e(z) * e(w).conj()).sum()
    }

    /// Max over pairs of `|Σ_j e_j(z) conj(e_j(w)) − k(z,w)|`.
    pub fn factor_residual(
        &self,
        factor: &dyn FactorKernel,
        pairs: &[(ComplexPoint, ComplexPoint)],
    ) -> f64 {
        pairs
            .iter()
            .map(|&(z, w)| (self.reproduce(z, w) - factor.k(z, w)).norm())
            .fold(0.0, f64::max)
    }
}

type PointFn = dyn Fn(ComplexPoint) -> Result<Complex64> + Send + Sync;

/// An evaluable function of one complex variable, built by composition.
#[derive(Clone)]
pub struct PointFunction(Arc<PointFn>);

impl fmt::Debug for PointFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PointFunction(..)")
    }
}

impl PointFunction {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(ComplexPoint) -> Result<Complex64> + Send + Sync + 'static,
    {
        Self(Arc::new(f))
    }

    pub fn eval(&self, z: ComplexPoint) -> Result<Complex64> {
        (self.0)(z)
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(move |_| Ok(c))
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn coordinate() -> Self {
        Self::new(Ok)
    }

    pub fn power(n: u32) -> Self {
        Self::new(move |z| Ok(z.powu(n)))
    }

    pub fn symbol(e: SymbolFn) -> Self {
        Self::new(move |z| Ok(e(z)))
    }

    /// `z ↦ Σ aᵢ K(z, wᵢ)`.
    pub fn section(model: Arc<ProductKernelModel>, section: KernelSection) -> Self {
        Self::new(move |z| section.eval(&model, z))
    }

    /// `f ∘ R`.
    pub fn compose(&self, map: Arc<dyn IterationMap>) -> Self {
        let f = self.clone();
        Self::new(move |z| f.eval(map.evaluate(z)))
    }

    pub fn mul(&self, other: &PointFunction) -> Self {
        let (f, g) = (self.clone(), other.clone());
        Self::new(move |z| Ok(f.eval(z)? * g.eval(z)?))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let f = self.clone();
        Self::new(move |z| Ok(c * f.eval(z)?))
    }

    pub fn add(&self, other: &PointFunction) -> Self {
        let (f, g) = (self.clone(), other.clone());
        Self::new(move |z| Ok(f.eval(z)? + g.eval(z)?))
    }

    pub fn linear_combination(terms: Vec<(Complex64, PointFunction)>) -> Self {
        Self::new(move |z| {
            terms
                .iter()
                .try_fold(Complex64::new(0.0, 0.0), |acc, (c, f)| Ok(acc + c * f.eval(z)?))
        })
    }
}

/// Square table of residuals indexed by symbol pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualMatrix {
    pub entries: Vec<Vec<f64>>,
}

impl ResidualMatrix {
    fn zeros(n: usize) -> Self {
        Self {
            entries: vec![vec![0.0; n]; n],
        }
    }

    fn raise(&mut self, i: usize, j: usize, v: f64) {
        // NaN must propagate so that it can never read as a pass.
        if v.is_nan() || v > self.entries[i][j] {
            self.entries[i][j] = v;
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn max(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .cloned()
            .fold(0.0, |a, b| if b.is_nan() || b > a { b } else { a })
    }

    pub fn max_diagonal(&self) -> f64 {
        (0..self.size()).map(|i| self.get(i, i)).fold(0.0, f64::max)
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.size();
        (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .fold(0.0, f64::max)
    }
}

/// A symbol family acting on a product-kernel space.
#[derive(Clone, Debug)]
pub struct Representation {
    family: SymbolFamily,
    model: Arc<ProductKernelModel>,
}

impl Representation {
    pub fn new(family: SymbolFamily, model: Arc<ProductKernelModel>) -> Self {
        Self { family, model }
    }

    pub fn family(&self) -> &SymbolFamily {
        &self.family
    }

    pub fn model(&self) -> &Arc<ProductKernelModel> {
        &self.model
    }

    pub fn map(&self) -> &dyn IterationMap {
        self.model.map()
    }

    pub fn count(&self) -> usize {
        self.family.count()
    }

    pub fn with_variant(mut self, variant: AdjointVariant) -> Self {
        self.family = self.family.with_variant(variant);
        self
    }

    /// `z ↦ e_j(z)·f(R(z))`.
    pub fn apply_s(&self, j: usize, f: &PointFunction) -> Result<PointFunction> {
        let e = Arc::clone(self.family.symbol(j)?);
        let map = self.model.map_arc();
        let f = f.clone();
        Ok(PointFunction::new(move |z| Ok(e(z) * f.eval(map.evaluate(z))?)))
    }

    /// `z ↦ (1/n(z)) Σ_{R(ζ)=z} σ(e_j(ζ))·f(ζ)`.
    pub fn apply_s_star_preimage(&self, j: usize, f: &PointFunction) -> Result<PointFunction> {
        let e = Arc::clone(self.family.symbol(j)?);
        let map = self.model.map_arc();
        let variant = self.family.variant;
        let f = f.clone();
        Ok(PointFunction::new(move |z| {
            let roots = map.preimages(z)?;
            let mut acc = Complex64::new(0.0, 0.0);
            for &zeta in &roots {
                acc += variant.apply(e(zeta)) * f.eval(zeta)?;
            }
            Ok(acc / roots.len() as f64)
        }))
    }

    /// Each term `(a, w)` becomes `(a·conj(e_j(w)), R(w))`.
    pub fn apply_s_star_section(&self, j: usize, s: &KernelSection) -> Result<KernelSection> {
        let e = self.family.symbol(j)?;
        let map = self.model.map();
        Ok(KernelSection::new(
            s.terms
                .iter()
                .map(|&(a, w)| (a * e(w).conj(), map.evaluate(w)))
                .collect(),
        ))
    }

    /// Max over ordered pairs of
    /// `|Σ_j e_j(z) conj(e_j(w)) K(Rz,Rw) − K(z,w)| / max(1, |K(z,w)|)`.
    pub fn verify_sum_identity(&self, points: &[ComplexPoint]) -> Result<f64> {
        let map = self.model.map();
        let orbits: Vec<KernelOrbit> = points
            .iter()
            .map(|&z| self.model.orbit(z))
            .collect::<Result<_>>()?;
        let image_orbits: Vec<KernelOrbit> = points
            .iter()
            .map(|&z| self.model.orbit(map.evaluate(z)))
            .collect::<Result<_>>()?;
        let mut worst: f64 = 0.0;
        for (a, (oa, ra)) in points.iter().zip(orbits.iter().zip(&image_orbits)) {
            for (b, (ob, rb)) in points.iter().zip(orbits.iter().zip(&image_orbits)) {
                let direct = self.model.eval_orbits(oa, ob)?.value;
                let shifted = self.model.eval_orbits(ra, rb)?.value;
                let summed = self.family.reproduce(*a, *b) * shifted;
                let r = (summed - direct).norm() / direct.norm().max(1.0);
                if r.is_nan() || r > worst {
                    worst = r;
                }
            }
        }
        Ok(worst)
    }

    /// Entry `(i,j)` is the max over probes and points of
    /// `|(S_i* S_j f)(z) − δᵢⱼ f(z)|`, adjoints by preimage averaging.
    pub fn verify_orthogonality(
        &self,
        points: &[ComplexPoint],
        probes: &[PointFunction],
    ) -> Result<ResidualMatrix> {
        let n = self.count();
        let mut out = ResidualMatrix::zeros(n);
        for j in 0..n {
            for f in probes {
                let sj_f = self.apply_s(j, f)?;
                for i in 0..n {
                    let composed = self.apply_s_star_preimage(i, &sj_f)?;
                    for &z in points {
                        let lhs = composed.eval(z)?;
                        let rhs = if i == j { f.eval(z)? } else { Complex64::new(0.0, 0.0) };
                        out.raise(i, j, (lhs - rhs).norm());
                    }
                }
            }
        }
        Ok(out)
    }

    /// Entry `(j,k)` is the max over points of
    /// `|(1/n(z)) Σ_{R(ζ)=z} σ(e_j(ζ)) e_k(ζ) − δ_jk|`.
    pub fn verify_symbol_sums(&self, points: &[ComplexPoint]) -> Result<ResidualMatrix> {
        let n = self.count();
        let variant = self.family.variant;
        let mut out = ResidualMatrix::zeros(n);
        for &z in points {
            let roots = self.model.map().preimages(z)?;
            let count = roots.len() as f64;
            for j in 0..n {
                for k in 0..n {
                    let e_j = self.family.symbol(j)?;
                    let e_k = self.family.symbol(k)?;
                    let avg: Complex64 = roots
                        .iter()
                        .map(|&zeta| variant.apply(e_j(zeta)) * e_k(zeta))
                        .sum::<Complex64>()
                        / count;
                    let delta = if j == k { 1.0 } else { 0.0 };
                    out.raise(j, k, (avg - delta).norm());
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iteration::Monomial;
    use crate::kernel::{CauchyFactor, TruncationPolicy};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn szego_rep() -> Representation {
        let model = ProductKernelModel::new(
            "szego",
            Arc::new(CauchyFactor),
            Arc::new(Monomial::new(2).unwrap()),
            TruncationPolicy::default(),
        );
        let family = SymbolFamily::new(AdjointVariant::Sesquilinear)
            .with_symbol("1", |_| c(1.0, 0.0))
            .with_symbol("z", |z| z);
        Representation::new(family, Arc::new(model))
    }

    #[test]
    fn index_out_of_range() {
        let rep = szego_rep();
        let f = PointFunction::one();
        assert!(matches!(
            rep.apply_s(2, &f).unwrap_err(),
            Error::IndexOutOfRange { index: 2, count: 2 }
        ));
        assert!(rep.apply_s_star_preimage(5, &f).is_err());
        assert!(rep.apply_s_star_section(2, &KernelSection::default()).is_err());
    }

    #[test]
    fn point_function_algebra() {
        let z = c(0.3, -0.4);
        let f = PointFunction::coordinate().mul(&PointFunction::power(2)).scale(c(2.0, 0.0));
        assert!((f.eval(z).unwrap() - 2.0 * z.powu(3)).norm() < 1e-15);
        let g = PointFunction::linear_combination(vec![
            (c(1.0, 0.0), PointFunction::one()),
            (c(0.0, 1.0), PointFunction::coordinate()),
        ]);
        assert!((g.eval(z).unwrap() - (1.0 + c(0.0, 1.0) * z)).norm() < 1e-15);
        let h = PointFunction::coordinate().compose(Arc::new(Monomial::new(3).unwrap()));
        assert!((h.eval(z).unwrap() - z.powu(3)).norm() < 1e-15);
        assert!((f.add(&g).eval(z).unwrap() - f.eval(z).unwrap() - g.eval(z).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn szego_symbols_reproduce_factor() {
        let rep = szego_rep();
        let pairs = [(c(0.1, 0.2), c(-0.5, 0.3)), (c(0.7, 0.0), c(0.0, -0.6))];
        assert!(rep.family().factor_residual(&CauchyFactor, &pairs) < 1e-15);
    }

    #[test]
    fn szego_symbol_sums_hold_on_circle_only() {
        let rep = szego_rep();
        let circle: Vec<_> = (0..16)
            .map(|k| Complex64::from_polar(1.0, 0.37 * k as f64))
            .collect();
        assert!(rep.verify_symbol_sums(&circle).unwrap().max() < 1e-14);
        let inside = rep.verify_symbol_sums(&[c(0.25, 0.0)]).unwrap();
        // (1/2) Σ |ζ|² = |z| = 0.25
        assert!((inside.get(1, 1) - 0.75).abs() < 1e-14);
        assert!(inside.get(0, 1) < 1e-15);
    }

    #[test]
    fn zero_symbol_gives_zero_coefficients() {
        let rep = szego_rep();
        let s = KernelSection::single(c(3.0, 1.0), c(0.0, 0.0));
        let out = rep.apply_s_star_section(1, &s).unwrap();
        assert_eq!(out.terms[0].0, c(0.0, 0.0));
    }

    #[test]
    fn nan_residuals_never_pass() {
        let mut m = ResidualMatrix::zeros(2);
        m.raise(0, 1, f64::NAN);
        assert!(m.max().is_nan());
        assert!(!(m.max() <= 1e-8));
    }
}
