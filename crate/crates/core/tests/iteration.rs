use cuntz_kernels::disk::{BlaschkeMap, BlaschkeProduct};
use cuntz_kernels::iteration::{classify_orbit, iterate, preimages, IterationMap, Monomial, OrbitStatus};
use cuntz_kernels::julia::JuliaMap;
use cuntz_kernels::{Complex64, Error};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Independent evaluation of z⁴ − 2z².
fn quartic(z: Complex64) -> Complex64 {
    z.powi(4) - 2.0 * z.powi(2)
}

fn arb_disk(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(move |(u, t)| Complex64::from_polar(radius * u.sqrt(), t))
}

#[test]
fn iterate_examples() {
    assert_eq!(iterate(&JuliaMap, c(0.0, 0.0), 7).unwrap(), c(0.0, 0.0));
    assert_eq!(iterate(&JuliaMap, c(2.0, 0.0), 1).unwrap(), c(8.0, 0.0));
    let z = c(0.3, -0.7);
    assert_eq!(iterate(&JuliaMap, z, 0).unwrap(), z);
    assert_eq!(iterate(&Monomial::new(3).unwrap(), z, 0).unwrap(), z);
}

#[test]
fn iterate_reports_overflow() {
    let err = iterate(&JuliaMap, c(3.0, 0.0), 40).unwrap_err();
    assert!(matches!(err, Error::EscapeOverflow { .. }));
    assert!(iterate(&JuliaMap, c(f64::NAN, 0.0), 1).is_err());
}

#[test]
fn classify_examples() {
    let r = classify_orbit(&JuliaMap, c(0.5, 0.0), 100).unwrap();
    assert_eq!(r.status, OrbitStatus::Converged);
    assert_eq!(r.points[1], c(-0.4375, 0.0));
    assert!(r.last().norm() < 1.0 / 3.0);
    assert!(r.tail_l2_bound.is_finite());

    let r = classify_orbit(&JuliaMap, c(2.0, 0.0), 100).unwrap();
    assert_eq!(r.status, OrbitStatus::Escaped);
    assert!(r.last().norm() > 2.0);
    assert!(r.tail_l2_bound.is_infinite());

    let r = classify_orbit(&JuliaMap, c(0.0, 0.0), 1).unwrap();
    assert_eq!(r.status, OrbitStatus::Converged);
    assert_eq!(r.steps_used, 0);

    assert!(classify_orbit(&JuliaMap, c(0.5, 0.0), 0).is_err());
}

#[test]
fn tail_l2_bound_dominates_orbit_tail() {
    let z = c(0.5, 0.0);
    let r = classify_orbit(&JuliaMap, z, 200).unwrap();
    assert_eq!(r.status, OrbitStatus::Converged);
    let mut w = r.last();
    let mut tail = 0.0;
    for _ in 0..200 {
        tail += w.norm_sqr();
        w = quartic(w);
    }
    assert!(tail <= r.tail_l2_bound);
}

#[test]
fn preimage_examples() {
    let s = std::f64::consts::SQRT_2;
    let r = preimages(&JuliaMap, c(0.0, 0.0)).unwrap();
    for (a, b) in r.iter().zip([-s, 0.0, 0.0, s]) {
        assert!((a - b).norm() < 1e-15);
    }
    let r = preimages(&JuliaMap, c(8.0, 0.0)).unwrap();
    assert_eq!(r.len(), 4);
    for &p in &r {
        assert!((quartic(p) - 8.0).norm() <= 1e-9 * 8.0);
    }
    assert!(r.iter().any(|&p| (p - 2.0).norm() < 1e-14));
    let r = preimages(&JuliaMap, c(-1.0, 0.0)).unwrap();
    for (a, b) in r.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
        assert!((a - b).norm() < 1e-15);
    }
}

#[test]
fn preimages_are_sorted() {
    let r = preimages(&JuliaMap, c(0.4, 1.1)).unwrap();
    for pair in r.windows(2) {
        assert!(pair[0].re < pair[1].re || (pair[0].re == pair[1].re && pair[0].im <= pair[1].im));
    }
}

#[test]
fn fixed_points_are_fixed() {
    let b = BlaschkeProduct::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.3, 0.4)]).unwrap();
    let maps: Vec<Box<dyn IterationMap>> = vec![
        Box::new(JuliaMap),
        Box::new(Monomial::new(2).unwrap()),
        Box::new(BlaschkeMap::new(b).unwrap()),
    ];
    for m in &maps {
        let l = m.fixed_point();
        assert!((m.evaluate(l) - l).norm() < 1e-15, "{}", m.name());
    }
}

#[test]
fn monomial_requires_power_two() {
    assert!(Monomial::new(1).is_err());
    assert_eq!(Monomial::new(3).unwrap().degree(), 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn julia_preimage_round_trip(z in arb_disk(2.0)) {
        let roots = preimages(&JuliaMap, z).unwrap();
        prop_assert_eq!(roots.len(), 4);
        for r in roots {
            prop_assert!((quartic(r) - z).norm() <= 1e-9 * z.norm().max(1.0));
        }
    }
}

proptest! {
    #[test]
    fn monomial_preimage_round_trip(z in arb_disk(1.0), d in 2u32..6) {
        let m = Monomial::new(d).unwrap();
        let roots = preimages(&m, z).unwrap();
        prop_assert_eq!(roots.len(), d as usize);
        for r in roots {
            prop_assert!((r.powu(d) - z).norm() <= 1e-9 * z.norm().max(1.0));
        }
    }

    #[test]
    fn blaschke_preimage_round_trip(z in arb_disk(0.95), w in arb_disk(0.8)) {
        let b = BlaschkeProduct::new(vec![c(0.0, 0.0), c(0.0, 0.0), w]).unwrap();
        let map = BlaschkeMap::new(b.clone()).unwrap();
        let roots = preimages(&map, z).unwrap();
        prop_assert_eq!(roots.len(), 3);
        for r in roots {
            prop_assert!((b.eval(r).unwrap() - z).norm() <= 1e-9);
        }
    }

    #[test]
    fn julia_semigroup(z in arb_disk(1.2), m in 0usize..6, n in 0usize..6) {
        // Stay where the orbit remains bounded by 2.
        let direct = iterate(&JuliaMap, z, m + n);
        prop_assume!(direct.is_ok());
        let mut w = z;
        let mut bounded = true;
        for _ in 0..m + n {
            w = quartic(w);
            bounded &= w.norm() <= 2.0;
        }
        prop_assume!(bounded);
        let direct = direct.unwrap();
        let split = iterate(&JuliaMap, iterate(&JuliaMap, z, m).unwrap(), n).unwrap();
        prop_assert!((direct - split).norm() <= 1e-12 * direct.norm().max(1e-300));
    }

    #[test]
    fn julia_contraction_certificate(z in arb_disk(1.0 / 3.0)) {
        prop_assert!(quartic(z).norm() <= 19.0 / 27.0 * z.norm() * (1.0 + 1e-14));
    }

    #[test]
    fn julia_escape_certificate(r in 2.0..10.0f64, t in 0.0..std::f64::consts::TAU) {
        let z = Complex64::from_polar(r, t);
        prop_assert!(quartic(z).norm() >= 4.0 * r * (1.0 - 1e-14));
    }
}
