//! Seeded verification suites behind `cuntz verify`.

use num_complex::Complex64;
use std::str::FromStr;
use std::sync::Arc;

use crate::cuntz::{PointFunction, Representation};
use crate::disk::{
    bergman_model, bergman_product, bergman_rep, cauchy_kernel, szego_decompose, szego_model, szego_product,
    szego_rep, BlaschkeProduct,
};
use crate::halfplane::{hardy_decompose, HerglotzModel, DEFAULT_HARDY_TERMS};
use crate::julia::{julia_model, julia_rep, preimage_residual, verify_juliarel};
use crate::kernel::{KernelSection, ProductKernelModel, TruncationPolicy};
use crate::onb::{partial_expansion, truncated_product};
use crate::sampling::Lcg;
use crate::{ComplexPoint, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Cuntz,
    Recursion,
    Onb,
    Juliarel,
    Phi1,
    Paris,
    Parseval,
    Multi,
    Gram,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Cuntz,
        Suite::Recursion,
        Suite::Onb,
        Suite::Juliarel,
        Suite::Phi1,
        Suite::Paris,
        Suite::Parseval,
        Suite::Multi,
        Suite::Gram,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Cuntz => "cuntz",
            Suite::Recursion => "recursion",
            Suite::Onb => "onb",
            Suite::Juliarel => "juliarel",
            Suite::Phi1 => "phi1",
            Suite::Paris => "paris",
            Suite::Parseval => "parseval",
            Suite::Multi => "multi",
            Suite::Gram => "gram",
        }
    }

    fn models(self) -> &'static [&'static str] {
        match self {
            Suite::Cuntz | Suite::Recursion | Suite::Gram => &["julia", "szego", "bergman"],
            Suite::Onb => &["julia", "szego"],
            Suite::Juliarel => &["julia"],
            Suite::Phi1 | Suite::Paris => &["lphi"],
            Suite::Parseval => &["lphi", "szego"],
            Suite::Multi => &["szego"],
        }
    }

    fn default_samples(self) -> usize {
        match self {
            Suite::Juliarel => 1000,
            Suite::Phi1 | Suite::Multi => 500,
            Suite::Cuntz | Suite::Gram => 50,
            _ => 100,
        }
    }

    fn takes_points(self) -> bool {
        matches!(
            self,
            Suite::Cuntz | Suite::Recursion | Suite::Onb | Suite::Juliarel | Suite::Gram
        )
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub model: Option<String>,
    pub seed: u64,
    pub samples: Option<usize>,
    pub depth: usize,
    pub hardy_terms: usize,
    pub points: Option<Vec<ComplexPoint>>,
    pub truncation: TruncationPolicy,
}

impl SuiteConfig {
    pub fn new(suite: Suite) -> Self {
        Self {
            suite,
            model: None,
            seed: 0,
            samples: None,
            depth: 5,
            hardy_terms: DEFAULT_HARDY_TERMS,
            points: None,
            truncation: TruncationPolicy::default(),
        }
    }

    pub fn model_name(&self) -> &str {
        self.model.as_deref().unwrap_or(self.suite.models()[0])
    }

    pub fn sample_count(&self) -> usize {
        self.samples.unwrap_or(self.suite.default_samples())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub name: String,
    pub max: f64,
    pub tolerance: f64,
}

impl Residual {
    fn new(name: &str, max: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_owned(),
            max,
            tolerance,
        }
    }

    /// NaN never passes.
    pub fn pass(&self) -> bool {
        self.max <= self.tolerance
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub model: String,
    pub residuals: Vec<Residual>,
    /// The suite is run on a model that is known to violate the identity.
    pub expected_negative: bool,
}

impl SuiteOutcome {
    pub fn pass(&self) -> bool {
        self.residuals.iter().all(Residual::pass)
    }
}

/// Running maximum that lets NaN win, so a broken evaluation cannot hide.
#[derive(Debug, Clone, Copy, Default)]
struct Worst(f64);

impl Worst {
    fn raise(&mut self, r: f64) {
        if r.is_nan() || r > self.0 {
            self.0 = r;
        }
    }
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let model = cfg.model_name().to_owned();
    if !cfg.suite.models().contains(&model.as_str()) {
        return Err(Error::invalid(format!(
            "suite {} supports models {:?}, not {model:?}",
            cfg.suite.name(),
            cfg.suite.models()
        )));
    }
    if cfg.points.is_some() && !cfg.suite.takes_points() {
        return Err(Error::invalid(format!("suite {} does not take --points", cfg.suite.name())));
    }
    if let Some(points) = &cfg.points {
        if points.is_empty() {
            return Err(Error::invalid("points file holds no points"));
        }
    }
    if cfg.sample_count() == 0 {
        return Err(Error::invalid("--samples must be at least 1"));
    }
    let mut rng = Lcg::new(cfg.seed);
    let (residuals, expected_negative) = match cfg.suite {
        Suite::Cuntz => cuntz(cfg, &model, &mut rng)?,
        Suite::Recursion => (recursion(cfg, &model, &mut rng)?, false),
        Suite::Onb => (onb(cfg, &model, &mut rng)?, false),
        Suite::Juliarel => (juliarel(cfg, &mut rng), false),
        Suite::Phi1 => (phi1(cfg, &mut rng)?, false),
        Suite::Paris => (paris(cfg, &mut rng)?, false),
        Suite::Parseval => (parseval(cfg, &model, &mut rng)?, false),
        Suite::Multi => (multi(cfg, &mut rng)?, false),
        Suite::Gram => (gram(cfg, &model, &mut rng)?, false),
    };
    Ok(SuiteOutcome {
        model,
        residuals,
        expected_negative,
    })
}

fn disk_model(name: &str, truncation: TruncationPolicy) -> ProductKernelModel {
    match name {
        "julia" => julia_model(truncation),
        "szego" => szego_model(truncation),
        _ => bergman_model(truncation),
    }
}

fn representation(name: &str, truncation: TruncationPolicy) -> Representation {
    match name {
        "julia" => julia_rep(truncation),
        "szego" => szego_rep(truncation),
        _ => bergman_rep(truncation),
    }
}

/// Sampling radius inside which the model's orbits converge quickly.
fn interior_radius(model: &str) -> f64 {
    if model == "julia" {
        0.4
    } else {
        0.9
    }
}

fn pairs(cfg: &SuiteConfig, rng: &mut Lcg, radius: f64) -> Vec<(ComplexPoint, ComplexPoint)> {
    match &cfg.points {
        Some(p) => (0..p.len()).map(|i| (p[i], p[(i + 1) % p.len()])).collect(),
        None => (0..cfg.sample_count())
            .map(|_| (rng.disk(radius), rng.disk(radius)))
            .collect(),
    }
}

/// Seeded draws from `|z| < radius` whose orbits converge, up to `count`.
fn converged_points(model: &ProductKernelModel, rng: &mut Lcg, radius: f64, count: usize) -> Result<Vec<ComplexPoint>> {
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 1000 * count {
            return Err(Error::Budget {
                what: "converged point sampling",
                limit: 1000 * count,
            });
        }
        let z = rng.disk(radius);
        if model.orbit(z).is_ok() {
            out.push(z);
        }
    }
    Ok(out)
}

fn cuntz(cfg: &SuiteConfig, model: &str, rng: &mut Lcg) -> Result<(Vec<Residual>, bool)> {
    const TOL: f64 = 1e-8;
    let rep = representation(model, cfg.truncation);
    let n = cfg.sample_count();
    let (orth_points, probes, sum_points) = if model == "julia" {
        let probes = vec![
            PointFunction::one(),
            PointFunction::coordinate(),
            PointFunction::power(2),
            PointFunction::section(
                Arc::clone(rep.model()),
                KernelSection::single(Complex64::new(1.0, 0.0), Complex64::new(0.2, 0.0)),
            ),
        ];
        match &cfg.points {
            Some(p) => (p.clone(), probes, p.clone()),
            None => {
                let orth = converged_points(rep.model(), rng, 1.5, n)?;
                (orth, probes, rng.disk_points(0.4, 20))
            }
        }
    } else {
        // The sesquilinear preimage average is the adjoint only on the
        // circle, where conj(ζ) = 1/ζ; kernel sections do not live there.
        let probes = vec![PointFunction::one(), PointFunction::coordinate(), PointFunction::power(2)];
        let circle: Vec<_> = (0..n).map(|_| rng.circle(1.0)).collect();
        let sum = match &cfg.points {
            Some(p) => p.clone(),
            None => rng.disk_points(0.8, 20),
        };
        (circle, probes, sum)
    };
    let orth = rep.verify_orthogonality(&orth_points, &probes)?;
    let sums = rep.verify_symbol_sums(&orth_points)?;
    let mut residuals = vec![
        Residual::new("orthogonality_diagonal", orth.max_diagonal(), TOL),
        Residual::new("orthogonality_off_diagonal", orth.max_off_diagonal(), TOL),
        Residual::new("symbol_sums", sums.max(), TOL),
        Residual::new("sum_identity", rep.verify_sum_identity(&sum_points)?, TOL),
    ];
    let expected_negative = model == "bergman";
    if expected_negative {
        let interior = rep.verify_symbol_sums(&sum_points)?;
        residuals.push(Residual::new("symbol_sums_interior", interior.max(), TOL));
    }
    Ok((residuals, expected_negative))
}

fn recursion(cfg: &SuiteConfig, model: &str, rng: &mut Lcg) -> Result<Vec<Residual>> {
    let m = disk_model(model, cfg.truncation);
    let mut worst = Worst::default();
    for (z, w) in pairs(cfg, rng, interior_radius(model)) {
        worst.raise(m.verify_recursion(z, w)?);
    }
    Ok(vec![Residual::new(
        "recursion",
        worst.0,
        10.0 * cfg.truncation.tail_tolerance,
    )])
}

fn onb(cfg: &SuiteConfig, model: &str, rng: &mut Lcg) -> Result<Vec<Residual>> {
    let rep = representation(model, cfg.truncation);
    let radius = if model == "julia" { 0.45 } else { 0.9 };
    let mut worst = Worst::default();
    for (z, w) in pairs(cfg, rng, radius) {
        for depth in 0..=cfg.depth {
            let sum = partial_expansion(&rep, depth, z, w)?;
            let product = truncated_product(&rep, depth, z, w);
            worst.raise((sum - product).norm() / product.norm());
        }
    }
    Ok(vec![Residual::new("onb_factorization", worst.0, 1e-12)])
}

fn juliarel(cfg: &SuiteConfig, rng: &mut Lcg) -> Vec<Residual> {
    const TOL: f64 = 1e-9;
    let points = match &cfg.points {
        Some(p) => p.clone(),
        None => rng.disk_points(2.0, cfg.sample_count()),
    };
    let mut worst = [Worst::default(); 4];
    for &z in &points {
        let [a, b, c] = verify_juliarel(z);
        worst[0].raise(a);
        worst[1].raise(b);
        worst[2].raise(c);
        worst[3].raise(preimage_residual(z));
    }
    vec![
        Residual::new("sum_zeta", worst[0].0, TOL),
        Residual::new("sum_zeta_squared", worst[1].0, TOL),
        Residual::new("mixed_sum", worst[2].0, TOL),
        Residual::new("preimage_substitution", worst[3].0, TOL),
    ]
}

/// Random `a = b = 0` model with `1..=5` jumps.
pub fn random_herglotz(rng: &mut Lcg) -> HerglotzModel {
    let n = rng.integer(1, 5);
    let masses: Vec<f64> = (0..n).map(|_| rng.range(0.1, 2.0)).collect();
    let poles: Vec<f64> = (0..n).map(|_| rng.range(-3.0, 3.0)).collect();
    HerglotzModel::jumps(masses, poles).expect("continuous draws are distinct")
}

/// Right-half-plane point away from the axis.
pub fn halfplane_point(rng: &mut Lcg) -> ComplexPoint {
    rng.rect(0.1, 3.0, -3.0, 3.0)
}

/// Point with `0.1 ≤ |Re z| < 3` on either side of the imaginary axis.
pub fn off_axis_point(rng: &mut Lcg) -> ComplexPoint {
    let z = halfplane_point(rng);
    if rng.uniform() < 0.5 {
        Complex64::new(-z.re, z.im)
    } else {
        z
    }
}

/// `z = (1 − u)/(1 + u)` with `|u| < radius`, so that the Hardy ratio of
/// both `z` and `1/z` is `|u|`.
pub fn cayley_point(rng: &mut Lcg, radius: f64) -> ComplexPoint {
    let u = rng.disk(radius);
    (1.0 - u) / (1.0 + u)
}

const PHI1_MODELS: usize = 20;

/// One probe beside each pole `−i·t_c` of `e_c`, closer than the neighbouring
/// poles, so the kernel sections at the probes are well separated.
pub fn phi2_probes(model: &HerglotzModel) -> Vec<ComplexPoint> {
    let poles = model.poles();
    poles
        .iter()
        .enumerate()
        .map(|(c, &t)| {
            let gap = poles
                .iter()
                .enumerate()
                .filter(|&(d, _)| d != c)
                .map(|(_, &u)| (t - u).abs())
                .fold(f64::INFINITY, f64::min);
            Complex64::new((0.25 * gap).min(0.25), -t)
        })
        .collect()
}

fn phi1(cfg: &SuiteConfig, rng: &mut Lcg) -> Result<Vec<Residual>> {
    let mut forms = Worst::default();
    let mut gram = Worst::default();
    for _ in 0..PHI1_MODELS {
        let model = random_herglotz(rng);
        for _ in 0..cfg.sample_count() {
            let (z, w) = (off_axis_point(rng), off_axis_point(rng));
            let sum = model.lphi_kernel(z, w)?;
            let quotient = model.lphi_kernel_quotient(z, w)?;
            // |K(z,w)| ≤ √(K(z,z) K(w,w)) sets the scale.
            let scale = (model.lphi_kernel(z, z)?.re * model.lphi_kernel(w, w)?.re).sqrt();
            forms.raise((sum - quotient).norm() / scale);
        }
        gram.raise(model.verify_phi2(&phi2_probes(&model))?);
    }
    Ok(vec![
        Residual::new("quotient_vs_sum", forms.0, 1e-12),
        Residual::new("phi2_gram", gram.0, 1e-10),
    ])
}

fn paris(cfg: &SuiteConfig, rng: &mut Lcg) -> Result<Vec<Residual>> {
    let model = HerglotzModel::reciprocal();
    let mut paris = Worst::default();
    let mut c_sum = Worst::default();
    for _ in 0..cfg.sample_count() {
        let (z, w) = (cayley_point(rng, 0.9), cayley_point(rng, 0.9));
        paris.raise(model.verify_paris(z, w, cfg.hardy_terms)?);
        c_sum.raise(model.verify_c_sum(z, w, cfg.hardy_terms)?);
    }
    Ok(vec![
        Residual::new("paris", paris.0, 1e-10),
        Residual::new("c_sum", c_sum.0, 1e-10),
    ])
}

fn random_section(rng: &mut Lcg, mut center: impl FnMut(&mut Lcg) -> ComplexPoint) -> KernelSection {
    let terms = rng.integer(1, 5);
    KernelSection::new((0..terms).map(|_| (rng.coefficient(), center(rng))).collect())
}

/// Blaschke product of degree `1..=4` with zeros in `|w| < 0.8`.
pub fn random_blaschke(rng: &mut Lcg) -> BlaschkeProduct {
    let n = rng.integer(1, 4);
    BlaschkeProduct::new(rng.disk_points(0.8, n)).expect("zeros inside the disk")
}

fn parseval(cfg: &SuiteConfig, model: &str, rng: &mut Lcg) -> Result<Vec<Residual>> {
    let mut worst = Worst::default();
    if model == "lphi" {
        let phi = HerglotzModel::reciprocal();
        for _ in 0..cfg.sample_count() {
            let f = random_section(rng, |r| cayley_point(r, 0.9));
            worst.raise(hardy_decompose(&f, &phi)?.parseval_residual);
        }
        Ok(vec![Residual::new("halfplane_parseval", worst.0, 1e-10)])
    } else {
        for _ in 0..cfg.sample_count() {
            let b = random_blaschke(rng);
            let f = random_section(rng, |r| r.disk(0.9));
            worst.raise(szego_decompose(&b, &f)?.parseval_residual);
        }
        Ok(vec![Residual::new("disk_parseval", worst.0, 1e-10)])
    }
}

fn multi(cfg: &SuiteConfig, rng: &mut Lcg) -> Result<Vec<Residual>> {
    const TOL: f64 = 1e-10;
    let mut szego = Worst::default();
    let mut bergman = Worst::default();
    let mut blaschke = Worst::default();
    for _ in 0..cfg.sample_count() {
        let (z, w) = (rng.disk(0.9), rng.disk(0.9));
        let k = cauchy_kernel(z, w)?;
        szego.raise((szego_product(z, w, 10) - k).norm() / k.norm());
        bergman.raise((bergman_product(z, w, 10) - k * k).norm() / (k * k).norm());
        let b = random_blaschke(rng);
        blaschke.raise(b.verify_multi(z, w)?);
    }
    Ok(vec![
        Residual::new("szego_product", szego.0, TOL),
        Residual::new("bergman_product", bergman.0, TOL),
        Residual::new("blaschke_multi", blaschke.0, TOL),
    ])
}

fn gram(cfg: &SuiteConfig, model: &str, rng: &mut Lcg) -> Result<Vec<Residual>> {
    const TOL: f64 = 1e-8;
    let m = disk_model(model, cfg.truncation);
    let points = match &cfg.points {
        Some(p) => p.clone(),
        None => rng.disk_points(interior_radius(model), cfg.sample_count()),
    };
    let report = m.gram_matrix_with_tolerance(&points, TOL)?;
    let violation = (-report.min_eigenvalue / report.trace).max(0.0);
    Ok(vec![Residual::new("psd_violation", violation, TOL)])
}
