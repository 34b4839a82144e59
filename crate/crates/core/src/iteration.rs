//! Forward iteration, orbit classification and preimage enumeration for
//! self-maps of planar domains.

use num_complex::Complex64;
use serde::Serialize;
use std::cmp::Ordering;
use std::f64::consts::TAU;

use crate::{ensure_finite, ComplexPoint, Error, Result};

/// Moduli beyond this are reported as [`Error::EscapeOverflow`] by [`iterate`].
pub const OVERFLOW_MODULUS: f64 = 1e150;

/// A self-map `R` of a planar domain with an attracting fixed point `ℓ`.
///
/// Implementors certify a contraction disk: for `|z − ℓ| < contraction_radius`
/// the map satisfies `|R(z) − ℓ| ≤ contraction_factor · |z − ℓ|`, and every
/// point with modulus above `escape_radius` is known to leave the domain.
pub trait IterationMap: Send + Sync {
    fn evaluate(&self, z: ComplexPoint) -> ComplexPoint;

    /// Number of preimages of a generic point, counted with multiplicity.
    fn degree(&self) -> usize;

    /// All `degree()` solutions of `R(ζ) = z`, counted with multiplicity and
    /// sorted with [`sort_lexicographic`].
    fn preimages(&self, z: ComplexPoint) -> Result<Vec<ComplexPoint>>;

    fn fixed_point(&self) -> ComplexPoint;
    fn contraction_radius(&self) -> f64;
    fn contraction_factor(&self) -> f64;
    fn escape_radius(&self) -> f64;

    fn name(&self) -> &str;
}

/// Sort by real part, then imaginary part.
pub fn sort_lexicographic(points: &mut [ComplexPoint]) {
    points.sort_by(|a, b| match a.re.total_cmp(&b.re) {
        Ordering::Equal => a.im.total_cmp(&b.im),
        other => other,
    });
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitStatus {
    Converged,
    Escaped,
    Unresolved,
}

#[derive(Debug, Clone)]
pub struct OrbitReport {
    /// `z, R(z), …, R_{steps_used}(z)`.
    pub points: Vec<ComplexPoint>,
    pub status: OrbitStatus,
    pub steps_used: usize,
    /// Upper bound on `Σ_{n ≥ steps_used} |R_n(z) − ℓ|²`; infinite unless converged.
    pub tail_l2_bound: f64,
}

impl OrbitReport {
    pub fn last(&self) -> ComplexPoint {
        *self.points.last().expect("orbit always holds its start point")
    }
}

/// `R_n(z)`, with `R_0(z) = z`.
pub fn iterate(map: &dyn IterationMap, z: ComplexPoint, n: usize) -> Result<ComplexPoint> {
    let mut w = ensure_finite(z)?;
    for step in 1..=n {
        w = map.evaluate(w);
        let modulus = w.norm();
        if !(modulus <= OVERFLOW_MODULUS) {
            return Err(Error::EscapeOverflow { step, modulus });
        }
    }
    Ok(w)
}

/// Iterate until the orbit enters the certified contraction disk, leaves the
/// escape radius, or `max_steps` is exhausted.
pub fn classify_orbit(
    map: &dyn IterationMap,
    z: ComplexPoint,
    max_steps: usize,
) -> Result<OrbitReport> {
    if max_steps == 0 {
        return Err(Error::invalid("max_steps must be at least 1"));
    }
    let ell = map.fixed_point();
    let rho = map.contraction_radius();
    let c = map.contraction_factor();
    let escape = map.escape_radius();

    let mut w = ensure_finite(z)?;
    let mut points = vec![w];
    for step in 0..=max_steps {
        let r = (w - ell).norm();
        if r < rho {
            return Ok(OrbitReport {
                points,
                status: OrbitStatus::Converged,
                steps_used: step,
                tail_l2_bound: r * r / (1.0 - c * c),
            });
        }
        // Non-finite moduli compare false, so NaN from overflow lands here too.
        if !(w.norm() <= escape) {
            return Ok(OrbitReport {
                points,
                status: OrbitStatus::Escaped,
                steps_used: step,
                tail_l2_bound: f64::INFINITY,
            });
        }
        if step == max_steps {
            break;
        }
        w = map.evaluate(w);
        points.push(w);
    }
    Ok(OrbitReport {
        points,
        status: OrbitStatus::Unresolved,
        steps_used: max_steps,
        tail_l2_bound: f64::INFINITY,
    })
}

/// Preimages of `z`, sorted lexicographically.
pub fn preimages(map: &dyn IterationMap, z: ComplexPoint) -> Result<Vec<ComplexPoint>> {
    let z = ensure_finite(z)?;
    let roots = map.preimages(z)?;
    debug_assert_eq!(roots.len(), map.degree());
    Ok(roots)
}

/// `z ↦ z^d` on the unit disk, `d ≥ 2`. With `d = 2` this is the Blaschke
/// product with a double zero at the origin.
#[derive(Debug, Clone)]
pub struct Monomial {
    power: u32,
    name: String,
}

impl Monomial {
    pub fn new(power: u32) -> Result<Self> {
        if power < 2 {
            return Err(Error::invalid("monomial map needs power >= 2"));
        }
        Ok(Self {
            power,
            name: format!("z^{power}"),
        })
    }

    pub fn power(&self) -> u32 {
        self.power
    }
}

impl IterationMap for Monomial {
    fn evaluate(&self, z: ComplexPoint) -> ComplexPoint {
        z.powu(self.power)
    }

    fn degree(&self) -> usize {
        self.power as usize
    }

    fn preimages(&self, z: ComplexPoint) -> Result<Vec<ComplexPoint>> {
        let d = self.power as f64;
        let (r, theta) = z.to_polar();
        let modulus = r.powf(1.0 / d);
        let mut roots: Vec<_> = (0..self.power)
            .map(|k| Complex64::from_polar(modulus, (theta + TAU * k as f64) / d))
            .collect();
        sort_lexicographic(&mut roots);
        Ok(roots)
    }

    fn fixed_point(&self) -> ComplexPoint {
        Complex64::new(0.0, 0.0)
    }

    // |z|^d ≤ 2^{1-d} |z| ≤ |z|/2 on |z| < 1/2.
    fn contraction_radius(&self) -> f64 {
        0.5
    }

    fn contraction_factor(&self) -> f64 {
        0.5
    }

    // The domain is the open unit disk.
    fn escape_radius(&self) -> f64 {
        1.0
    }

    fn name(&self) -> &str {
        &self.name
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_iterations_is_identity() {
        let m = Monomial::new(2).unwrap();
        let z = c(0.3, -0.7);
        assert_eq!(iterate(&m, z, 0).unwrap(), z);
    }

    #[test]
    fn iterate_squares() {
        let m = Monomial::new(2).unwrap();
        let z = iterate(&m, c(0.5, 0.0), 3).unwrap();
        assert!((z - c(0.5f64.powi(8), 0.0)).norm() < 1e-16);
    }

    #[test]
    fn iterate_overflow_is_an_error() {
        let m = Monomial::new(2).unwrap();
        let err = iterate(&m, c(10.0, 0.0), 20).unwrap_err();
        assert!(matches!(err, Error::EscapeOverflow { .. }));
    }

    #[test]
    fn non_finite_input_rejected() {
        let m = Monomial::new(2).unwrap();
        assert!(iterate(&m, c(f64::NAN, 0.0), 1).is_err());
        assert!(classify_orbit(&m, c(f64::INFINITY, 0.0), 5).is_err());
        assert!(preimages(&m, c(0.0, f64::NAN)).is_err());
    }

    #[test]
    fn classify_rejects_zero_steps() {
        let m = Monomial::new(2).unwrap();
        assert!(classify_orbit(&m, c(0.1, 0.0), 0).is_err());
    }

    #[test]
    fn circle_points_stay_unresolved() {
        let m = Monomial::new(2).unwrap();
        let report = classify_orbit(&m, c(0.0, 1.0), 50).unwrap();
        assert_eq!(report.status, OrbitStatus::Unresolved);
        assert_eq!(report.steps_used, 50);
        assert_eq!(report.points.len(), 51);
        assert!(report.tail_l2_bound.is_infinite());
    }

    #[test]
    fn converged_report_bounds_tail() {
        let m = Monomial::new(2).unwrap();
        let report = classify_orbit(&m, c(0.9, 0.0), 100).unwrap();
        assert_eq!(report.status, OrbitStatus::Converged);
        let last = report.last();
        assert!(last.norm() < 0.5);
        let brute: f64 = (0..60)
            .map(|n| iterate(&m, last, n).unwrap().norm_sqr())
            .sum();
        assert!(brute <= report.tail_l2_bound);
    }

    #[test]
    fn monomial_preimages_are_roots() {
        let m = Monomial::new(3).unwrap();
        let z = c(-0.2, 0.4);
        let roots = preimages(&m, z).unwrap();
        assert_eq!(roots.len(), 3);
        for r in &roots {
            assert!((m.evaluate(*r) - z).norm() < 1e-14);
        }
        let mut sorted = roots.clone();
        sort_lexicographic(&mut sorted);
        assert_eq!(roots, sorted);
        assert_eq!(
            preimages(&m, c(0.0, 0.0)).unwrap(),
            vec![c(0.0, 0.0); 3]
        );
    }
}
