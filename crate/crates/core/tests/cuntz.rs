use std::sync::Arc;

use cuntz_kernels::cuntz::{AdjointVariant, PointFunction};
use cuntz_kernels::disk::{bergman_rep, szego_rep};
use cuntz_kernels::julia::julia_rep;
use cuntz_kernels::kernel::{KernelSection, TruncationPolicy};
use cuntz_kernels::sampling::Lcg;
use cuntz_kernels::{Complex64, Error};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1.0)
}

fn policy() -> TruncationPolicy {
    TruncationPolicy::default()
}

#[test]
fn apply_s_examples() {
    let rep = julia_rep(policy());
    let one = PointFunction::one();
    let id = PointFunction::coordinate();
    let s0 = rep.apply_s(0, &one).unwrap();
    let s1 = rep.apply_s(1, &one).unwrap();
    let s1z = rep.apply_s(1, &id).unwrap();
    for z in [c(0.3, 0.1), c(-1.2, 0.7), c(0.0, 0.0)] {
        assert_eq!(s0.eval(z).unwrap(), c(1.0, 0.0));
        assert_eq!(s1.eval(z).unwrap(), z);
        let oracle = z.powi(5) - 2.0 * z.powi(3);
        assert!(close(s1z.eval(z).unwrap(), oracle, 1e-14));
    }
    assert!(matches!(rep.apply_s(2, &one).unwrap_err(), Error::IndexOutOfRange { .. }));
}

#[test]
fn preimage_adjoint_examples() {
    let rep = julia_rep(policy());
    let one = PointFunction::one();
    let id = PointFunction::coordinate();
    let a0 = rep.apply_s_star_preimage(0, &one).unwrap();
    let a1 = rep.apply_s_star_preimage(1, &one).unwrap();
    let a1z = rep.apply_s_star_preimage(1, &id).unwrap();
    let mut rng = Lcg::new(1);
    for _ in 0..50 {
        let z = rng.disk(2.0);
        assert!(close(a0.eval(z).unwrap(), c(1.0, 0.0), 1e-15));
        assert!(a1.eval(z).unwrap().norm() <= 1e-12);
        assert!(close(a1z.eval(z).unwrap(), c(1.0, 0.0), 1e-12));
    }
}

#[test]
fn section_adjoint_examples() {
    let rep = julia_rep(policy());
    let s = rep
        .apply_s_star_section(1, &KernelSection::single(c(1.0, 0.0), c(0.5, 0.0)))
        .unwrap();
    assert_eq!(s.terms, vec![(c(0.5, 0.0), c(-0.4375, 0.0))]);

    let s = rep
        .apply_s_star_section(0, &KernelSection::single(c(2.0, 1.0), c(0.3, 0.0)))
        .unwrap();
    let r03 = 0.3f64.powi(4) - 2.0 * 0.09;
    assert_eq!(s.terms[0].0, c(2.0, 1.0));
    assert!((s.terms[0].1 - r03).norm() < 1e-16);

    let s = rep
        .apply_s_star_section(1, &KernelSection::single(c(1.0, 0.0), c(0.0, 0.0)))
        .unwrap();
    assert_eq!(s.terms[0].0, c(0.0, 0.0));
}

#[test]
fn sum_identity_examples() {
    let rep = julia_rep(policy());
    assert_eq!(rep.verify_sum_identity(&[c(0.0, 0.0)]).unwrap(), 0.0);
    let mut rng = Lcg::new(2);
    let pts = rng.disk_points(0.4, 20);
    assert!(rep.verify_sum_identity(&pts).unwrap() <= 1e-8);
    let pts = rng.disk_points(0.8, 20);
    assert!(szego_rep(policy()).verify_sum_identity(&pts).unwrap() <= 1e-10);
}

#[test]
fn julia_orthogonality() {
    let rep = julia_rep(policy());
    let probes = vec![
        PointFunction::one(),
        PointFunction::coordinate(),
        PointFunction::section(
            Arc::clone(rep.model()),
            KernelSection::single(c(1.0, 0.0), c(0.2, 0.0)),
        ),
    ];
    let mut rng = Lcg::new(4);
    let mut pts = Vec::new();
    while pts.len() < 50 {
        let z = rng.disk(1.5);
        if rep.model().orbit(z).is_ok() {
            pts.push(z);
        }
    }
    let m = rep.verify_orthogonality(&pts, &probes).unwrap();
    assert_eq!(m.size(), 2);
    assert!(m.max_off_diagonal() <= 1e-9);
    assert!(m.max_diagonal() <= 1e-9);

    let m = rep.verify_orthogonality(&pts, &[PointFunction::one()]).unwrap();
    assert!(m.max_diagonal() <= 1e-12);
}

#[test]
fn bergman_is_a_negative_witness() {
    let rep = bergman_rep(policy());
    let mut rng = Lcg::new(6);
    let pts = rng.disk_points(0.9, 30);
    let m = rep
        .verify_orthogonality(&pts, &[PointFunction::one(), PointFunction::coordinate()])
        .unwrap();
    assert!(m.max() >= 0.01);
    // The symbol family still reproduces k = (1 + z conj(w))².
    let (z, w) = (c(0.3, 0.2), c(-0.5, 0.1));
    let k = (1.0 + z * w.conj()).powi(2);
    assert!(close(rep.family().reproduce(z, w), k, 1e-14));
}

#[test]
fn symbol_sums() {
    let rep = julia_rep(policy());
    let mut rng = Lcg::new(8);
    let pts = rng.disk_points(2.0, 1000);
    assert!(rep.verify_symbol_sums(&pts).unwrap().max() <= 1e-9);

    // Brute force: Σ|ζ|² over the preimages of 1 + i is not 4.
    let z = c(1.0, 1.0);
    let roots = rep.map().preimages(z).unwrap();
    let brute: f64 = roots.iter().map(|r| r.norm_sqr()).sum::<f64>() / 4.0;
    let ses = rep.with_variant(AdjointVariant::Sesquilinear);
    let m = ses.verify_symbol_sums(&[z]).unwrap();
    assert!((m.get(1, 1) - (brute - 1.0).abs()).abs() < 1e-12);
    assert!(m.get(1, 1) > 0.1);
    assert_eq!(m.get(0, 0), 0.0);
}

#[test]
fn szego_symbol_sums_on_circle() {
    let rep = szego_rep(policy());
    let mut rng = Lcg::new(9);
    let pts: Vec<_> = (0..200).map(|_| rng.circle(1.0)).collect();
    assert!(rep.verify_symbol_sums(&pts).unwrap().max() <= 1e-12);
}

#[test]
fn section_rule_matches_preimage_average() {
    // On sections the two adjoints agree through the bilinear sums of the
    // julia representation.
    let rep = julia_rep(policy());
    let mut rng = Lcg::new(10);
    for _ in 0..30 {
        let terms = rng.integer(1, 4);
        let s = KernelSection::new((0..terms).map(|_| (rng.coefficient(), rng.disk(0.35))).collect());
        let f = PointFunction::section(Arc::clone(rep.model()), s.clone());
        for j in 0..2 {
            let by_rule = rep.apply_s_star_section(j, &s).unwrap();
            let by_average = rep.apply_s_star_preimage(j, &f).unwrap();
            let z = rng.disk(0.3);
            let a = by_rule.eval(rep.model(), z).unwrap();
            let b = by_average.eval(z).unwrap();
            assert!(close(a, b, 1e-8), "{a} vs {b}");
        }
    }
}

#[test]
fn duality_pairing() {
    // ⟨S_j* K_w, K_v⟩ = conj(e_j(w)) K(v, R(w)) and ⟨K_w, S_j K_v⟩ = conj((S_j K_v)(w)).
    let rep = julia_rep(policy());
    let model = Arc::clone(rep.model());
    let kernel = |z, w| model.kernel(z, w);
    let mut rng = Lcg::new(12);
    for _ in 0..50 {
        let (w, v) = (rng.disk(0.35), rng.disk(0.35));
        for j in 0..2 {
            let kw = KernelSection::single(c(1.0, 0.0), w);
            let kv = KernelSection::single(c(1.0, 0.0), v);
            let lhs = rep.apply_s_star_section(j, &kw).unwrap().inner_with(&kv, kernel).unwrap();
            let s_kv = rep.apply_s(j, &PointFunction::section(Arc::clone(&model), kv)).unwrap();
            let rhs = s_kv.eval(w).unwrap().conj();
            assert!(close(lhs, rhs, 1e-10));
        }
    }
}

#[test]
fn symbol_family_reproduces_factor() {
    let mut rng = Lcg::new(13);
    let pairs: Vec<_> = (0..100).map(|_| (rng.disk(0.9), rng.disk(0.9))).collect();
    for rep in [julia_rep(policy()), szego_rep(policy()), bergman_rep(policy())] {
        let r = rep.family().factor_residual(rep.model().factor(), &pairs);
        assert!(r <= 1e-12);
    }
}
