//! Independent oracles for the critical-point machinery: bisection roots,
//! sign scans, and direct re-verification of classified candidates.

use bigauss::density::DoubleGaussianDensity;
use bigauss::par::ExecMode;
use bigauss::roots::find_root;
use bigauss::stationary::{
    classify_candidates, inflection_data, inflection_point, log_derivative_level_set,
    log_derivative_positive_zero,
};
use bigauss::{WeightedMeasure, VARIANCE_GRID};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn psi1(dens: &DoubleGaussianDensity, x: f64) -> f64 {
    dens.log_density_derivatives(x).0
}

fn psi2(dens: &DoubleGaussianDensity, x: f64) -> f64 {
    dens.log_density_derivatives(x).1
}

/// Plain bisection, kept deliberately separate from the library's root
/// finder so closed forms are checked against a second implementation.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    assert!(
        f(lo) * f(hi) < 0.0,
        "bisection bracket must straddle a sign change"
    );
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn inflection_closed_form_matches_bisection_of_the_second_derivative() {
    for &a2 in &[0.25, 0.5, 0.9] {
        let dens = DoubleGaussianDensity::new(a2).unwrap();
        let c = inflection_point(&dens).unwrap();
        let oracle = bisect(|x| psi2(&dens, x), 1e-9, 2.0);
        assert!((c - oracle).abs() <= 1e-10, "a2 = {a2}: {c} vs {oracle}");
    }
}

#[test]
fn second_derivative_vanishes_at_the_inflection_across_the_grid() {
    for &a2 in VARIANCE_GRID.iter().filter(|&&v| v <= 1.0) {
        let dens = DoubleGaussianDensity::new(a2).unwrap();
        let c = inflection_point(&dens).unwrap();
        assert!(psi2(&dens, c).abs() <= 1e-10, "a2 = {a2}");
        assert!(psi2(&dens, -c).abs() <= 1e-10, "a2 = {a2}");
    }
}

#[test]
fn log_derivative_zero_matches_its_fixed_point_equation() {
    for &a2 in &[0.16, 0.5, 0.7, 0.9, 0.99] {
        let dens = DoubleGaussianDensity::new(a2).unwrap();
        let c = inflection_point(&dens).unwrap();
        let d = log_derivative_positive_zero(&dens).unwrap();
        assert!(d > c && d <= 1.0, "a2 = {a2}: d = {d}");
        assert!((d - (d / a2).tanh()).abs() <= 1e-12, "a2 = {a2}");
        let oracle = bisect(|x| psi1(&dens, x), c + 1e-12, 1.0 + 1e-9);
        assert!((d - oracle).abs() <= 1e-10, "a2 = {a2}: {d} vs {oracle}");
    }
}

#[test]
fn log_derivative_zero_decreases_toward_one_variance() {
    let mut last = f64::INFINITY;
    for &a2 in &[0.5, 0.7, 0.9, 0.99] {
        let dens = DoubleGaussianDensity::new(a2).unwrap();
        let d = log_derivative_positive_zero(&dens).unwrap();
        assert!(d < last, "a2 = {a2}");
        last = d;
    }
    let dens = DoubleGaussianDensity::new(0.16).unwrap();
    let d = log_derivative_positive_zero(&dens).unwrap();
    assert!(psi1(&dens, d - 1e-6) > 0.0 && psi1(&dens, d + 1e-6) < 0.0);
}

#[test]
fn matching_point_carries_the_inflection_log_density() {
    for &a2 in &[0.16, 0.5, 0.9] {
        let dens = DoubleGaussianDensity::new(a2).unwrap();
        let data = inflection_data(&dens).unwrap();
        let d = data.d.unwrap();
        let b = data.b_match.unwrap();
        assert!(b > d, "a2 = {a2}");
        assert!(
            (dens.log_density(b) - dens.log_density(data.c)).abs() <= 1e-12,
            "a2 = {a2}"
        );
    }
}

#[test]
fn zero_level_set_is_the_three_critical_points() {
    let dens = DoubleGaussianDensity::new(0.5).unwrap();
    let d = log_derivative_positive_zero(&dens).unwrap();
    let set = log_derivative_level_set(&dens, 0.0).unwrap();
    assert_eq!(set.len(), 3);
    assert!((set[0] + d).abs() <= 1e-10);
    assert!(set[1].abs() <= 1e-10);
    assert!((set[2] - d).abs() <= 1e-10);
}

#[test]
fn level_set_through_a_probe_point_has_the_proof_structure() {
    let dens = DoubleGaussianDensity::new(0.5).unwrap();
    let c = inflection_point(&dens).unwrap();
    let kappa = psi1(&dens, 0.2).abs();
    let set = log_derivative_level_set(&dens, kappa).unwrap();
    assert!(set.iter().any(|&r| (r - 0.2).abs() <= 1e-10));
    let t = set
        .iter()
        .copied()
        .find(|&r| r > c && (psi1(&dens, r) - psi1(&dens, 0.2)).abs() <= 1e-9)
        .expect("descending-branch partner");
    let u = set
        .iter()
        .copied()
        .find(|&r| r > t && (psi1(&dens, r) + psi1(&dens, 0.2)).abs() <= 1e-9)
        .expect("outer negative-curvature partner");
    assert!(u > t && t > c);
    for &r in &set {
        assert!((psi1(&dens, r).abs() - kappa).abs() <= 1e-10);
    }
}

#[test]
fn large_level_values_leave_only_the_outer_pair() {
    let dens = DoubleGaussianDensity::new(0.5).unwrap();
    let c = inflection_point(&dens).unwrap();
    let set = log_derivative_level_set(&dens, 10.0).unwrap();
    assert!(set.len() <= 2);
    assert!(set.iter().all(|&r| r.abs() > c));
}

#[test]
fn level_sets_are_closed_under_negation() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1EE7_5E75);
    for &a2 in &[0.16, 0.5, 0.9] {
        let dens = DoubleGaussianDensity::new(a2).unwrap();
        let c = inflection_point(&dens).unwrap();
        let cap = psi1(&dens, c) * 1.2;
        for _ in 0..25 {
            let kappa = rng.gen_range(0.0..cap);
            let set = log_derivative_level_set(&dens, kappa).unwrap();
            assert!(set.windows(2).all(|w| w[0] < w[1]));
            for &r in &set {
                assert!(
                    set.iter().any(|&m| (m + r).abs() <= 1e-10),
                    "a2 = {a2}, kappa = {kappa}: {r} has no mirror in {set:?}"
                );
            }
        }
    }
}

#[test]
fn third_derivative_sign_is_odd_about_the_origin() {
    for &a2 in &VARIANCE_GRID {
        let dens = DoubleGaussianDensity::new(a2).unwrap();
        let span = 1.0 + 4.0 * dens.stddev();
        for i in 1..=1000 {
            let x = span * i as f64 / 1000.0;
            let p3 = dens.log_density_derivatives(x).2;
            assert!(p3 < 0.0 || x / a2 > 20.0, "a2 = {a2}, x = {x}: {p3}");
            let m3 = dens.log_density_derivatives(-x).2;
            assert!(m3 > 0.0 || x / a2 > 20.0, "a2 = {a2}, x = {x}: {m3}");
        }
    }
}

#[test]
fn second_derivative_sign_flips_only_at_the_inflection() {
    for &a2 in &[0.16, 0.5, 0.9] {
        let dens = DoubleGaussianDensity::new(a2).unwrap();
        let c = inflection_point(&dens).unwrap();
        for i in 0..200 {
            let inside = -c + 2.0 * c * (i as f64 + 0.5) / 200.0;
            assert!(psi2(&dens, inside) > 0.0, "a2 = {a2}, x = {inside}");
            let outside = c + 1e-6 + 2.0 * i as f64 / 200.0;
            assert!(psi2(&dens, outside) < 0.0, "a2 = {a2}, x = {outside}");
            assert!(psi2(&dens, -outside) < 0.0, "a2 = {a2}, x = {outside}");
        }
    }
}

#[test]
fn matched_increments_have_ordered_slopes() {
    // p(x) = psi(d) - psi(d - x) climbs the inner side of the peak at d;
    // q(x) = psi(d) - psi(d + x) climbs the outer side. Whenever the two
    // increments agree, the outer slope must be strictly steeper.
    for &a2 in &[0.16, 0.5] {
        let dens = DoubleGaussianDensity::new(a2).unwrap();
        let d = log_derivative_positive_zero(&dens).unwrap();
        let p = |x: f64| dens.log_density(d) - dens.log_density(d - x);
        let q = |x: f64| dens.log_density(d) - dens.log_density(d + x);
        let p_cap = p(d);
        let beta_max = find_root(
            |b: f64| q(b) - p_cap,
            1e-6,
            1.0 + 8.0 * dens.stddev(),
            1e-13,
        )
        .unwrap();
        for i in 1..19 {
            let beta = beta_max * i as f64 / 20.0;
            let target = q(beta);
            let alpha = find_root(|x: f64| p(x) - target, 1e-12, d, 1e-13).unwrap();
            let p_slope = psi1(&dens, d - alpha);
            let q_slope = -psi1(&dens, d + beta);
            assert!(
                q_slope - p_slope > 1e-9,
                "a2 = {a2}, beta = {beta}: q' = {q_slope}, p' = {p_slope}"
            );
        }
    }
}

#[test]
fn classified_candidates_survive_independent_reverification() {
    for &(a2, mass) in &[(0.5, 0.2), (0.16, 0.25), (0.9, 0.35)] {
        let dens = DoubleGaussianDensity::new(a2).unwrap();
        let target = WeightedMeasure::new(mass).unwrap();
        let candidates = classify_candidates(&dens, target, ExecMode::Sequential).unwrap();
        assert!(!candidates.is_empty());
        for cand in &candidates {
            let back = dens.region_mass(&cand.region).unwrap().value();
            assert!(
                (back - mass).abs() <= 1e-9,
                "a2 = {a2}, mass {mass}: recomputed {back} for {cand:?}"
            );
            assert!(back > 0.0 && back < 0.5);
            assert!(cand.points.windows(2).all(|w| w[0] < w[1]));
            let kappas: Vec<f64> = cand.points.iter().map(|&p| psi1(&dens, p).abs()).collect();
            for k in &kappas {
                assert!(
                    (k - kappas[0]).abs() <= 1e-9,
                    "a2 = {a2}, mass {mass}: curvatures {kappas:?}"
                );
            }
        }
    }
}
