use std::f64::consts::PI;

use abmoser::greens::{self, Displacement, KernelId, KernelParams, KernelPoint, Regime};
use abmoser::heatkernels::TaParams;
use abmoser::specfun::{self, BesselArgs, EvalPolicy};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn phi1_closed_form_matches_laplace_at_fifty_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let dw = rng.gen_range(-3.0..3.0);
        let th = rng.gen_range(-PI..PI);
        let lambda = rng.gen_range(0.2..3.0);
        let d = Displacement::new(dw, th).unwrap();
        let c = greens::phi1(d, lambda).unwrap();
        let l = greens::phi1_laplace(d, lambda).unwrap();
        worst = worst.max(((c - l) / c).abs());
    }
    assert!(worst < 1e-8, "worst relative error {worst}");
}

#[test]
fn theta_weight_identity_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let pol = EvalPolicy::default();
    for _ in 0..100 {
        let w = rng.gen_range(0.05..5.0);
        let wp = rng.gen_range(0.05..5.0);
        let th = rng.gen_range(-PI..PI);
        let c = greens::theta_weight_closed(w, wp, th);
        let q = greens::theta_weight_quadrature(w, wp, th).unwrap();
        let h = greens::theta_weight_hypergeometric(w, wp, th, &pol).unwrap();
        assert!(((c - q) / c).abs() < 1e-10, "({w}, {wp}, {th}): {c} vs {q}");
        assert!(((c - h) / c).abs() < 1e-10);
    }
}

#[test]
fn image_sum_converged_in_far_tail() {
    for &(dw, th) in &[(3.0, 0.5), (6.0, 2.0), (1.5, -3.0)] {
        let d = Displacement::new(dw, th).unwrap();
        let a = greens::phi1_truncated(d, 1.0, 20).unwrap();
        let b = greens::phi1_truncated(d, 1.0, 40).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!((greens::phi1(d, 1.0).unwrap() - b).abs() < 1e-12);
    }
}

#[test]
fn phi2_dominated_by_phi1_plus_k0() {
    let params = KernelParams::new(1.0, 0.25, None).unwrap();
    let train: Vec<_> = [0.02, 0.1, 0.5, 1.0, 2.0, 4.0]
        .iter()
        .flat_map(|&dw| [0.0, 0.7, 2.5].map(|th| Displacement::new(dw, th).unwrap()))
        .collect();
    let c = greens::fit_domination_constant(&params, &train).unwrap();
    let k0 = |x: f64| specfun::bessel_k(BesselArgs::new(0.0, x).unwrap(), &EvalPolicy::default()).unwrap();
    for &dw in &[0.05, 0.3, 0.75, 1.5, 3.0] {
        for &th in &[0.0, 0.35, 1.6, 3.0] {
            let d = Displacement::new(dw, th).unwrap();
            let p2 = greens::phi2(d, 1.0, &params.ta).unwrap();
            let p1 = greens::phi1(d, 1.0).unwrap();
            assert!(p2.abs() <= p1 + c * k0(dw), "({dw}, {th})");
        }
    }
}

#[test]
fn phi2_tends_to_phi1_as_flux_vanishes() {
    let p = TaParams::new(1e-8, 0.5).unwrap();
    let d = Displacement::new(0.4, 1.0).unwrap();
    let diff = greens::phi2(d, 1.0, &p).unwrap() - greens::phi1(d, 1.0).unwrap();
    assert!(diff.abs() < 1e-6);
}

#[test]
fn phi4_direct_term_below_leading_singularity() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let w = rng.gen_range(0.2..4.0);
        let wp = rng.gen_range(0.2..4.0);
        let th = rng.gen_range(-PI..PI);
        let s = greens::phi4_split(w, wp, th, 1.0).unwrap();
        assert!(s.direct <= 1.0 / (2.0 * PI * (w - wp).hypot(th)) * (1.0 + 1e-12));
    }
}

#[test]
fn phi5_matches_phi4_without_flux() {
    let p = TaParams::new(1e-8, 0.5).unwrap();
    let a = greens::phi5(1.5, 2.0, 0.3, 1.0, &p).unwrap();
    let b = greens::phi4(1.5, 2.0, 0.3, 1.0).unwrap();
    assert!((a - b).abs() < 1e-6);
}

#[test]
fn all_certificates_hold_on_held_out_grids() {
    let params = KernelParams::new(1.0, 0.25, None).unwrap();
    for kernel in KernelId::ALL {
        for regime in [Regime::Near, Regime::Far] {
            let cert = greens::certify_bounds(kernel, regime, &params).unwrap();
            let (_, held) = greens::default_grids(kernel, regime);
            let v = greens::verify_certificate(&cert, &held).unwrap();
            assert!(v.holds, "{kernel} {regime:?}: {} > {}", v.max_ratio, v.fitted_constant);
        }
    }
}

#[test]
fn rearranged_phi1_below_envelope() {
    let params = KernelParams::new(1.0, 0.25, None).unwrap();
    let certs = [
        greens::certify_bounds(KernelId::Phi1, Regime::Near, &params).unwrap(),
        greens::certify_bounds(KernelId::Phi1, Regime::Far, &params).unwrap(),
    ];
    // cell midpoints of a strip |Δw| ≤ 12 around the origin
    let (nw, nt) = (480, 64);
    let hw = 24.0 / nw as f64;
    let ht = 2.0 * PI / nt as f64;
    let mut vals = Vec::new();
    for i in 0..nw {
        for j in 0..nt {
            let d = Displacement::new(-12.0 + (i as f64 + 0.5) * hw, -PI + (j as f64 + 0.5) * ht).unwrap();
            vals.push(greens::phi1(d, 1.0).unwrap());
        }
    }
    let samples = abmoser::rearrange::MeasuredSamples::new(vals, vec![hw * ht; nw * nt]).unwrap();
    let prof = abmoser::rearrange::rearrange(&samples).unwrap();
    for &t in &[0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 40.0] {
        let env = greens::rearrangement_upper(KernelId::Phi1, t, &certs).unwrap();
        assert!(prof.star(t) <= env, "t = {t}: {} > {env}", prof.star(t));
    }
}

#[test]
fn certificate_hash_is_reproducible() {
    let params = KernelParams::new(0.5, 0.1, Some(0.3)).unwrap();
    let a = greens::certify_bounds(KernelId::Phi4, Regime::Far, &params).unwrap();
    let b = greens::certify_bounds_on(KernelId::Phi4, Regime::Far, &params, a.training_grid.clone()).unwrap();
    assert_eq!(a, b);
    let other = greens::certify_bounds(KernelId::Phi4, Regime::Near, &params).unwrap();
    assert_ne!(a.grid_hash, other.grid_hash);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi1_positive_symmetric(dw in -4.0f64..4.0, th in -3.1f64..3.1, lambda in 0.1f64..4.0) {
        prop_assume!(dw.abs() > 1e-3 || th.abs() > 1e-3);
        let a = greens::phi1(Displacement::new(dw, th).unwrap(), lambda).unwrap();
        let b = greens::phi1(Displacement::new(-dw, -th).unwrap(), lambda).unwrap();
        prop_assert!(a > 0.0);
        prop_assert!((a - b).abs() <= 1e-14 * a);
    }

    #[test]
    fn phi1_periodic_in_theta(dw in 0.01f64..3.0, th in -3.0f64..3.0) {
        let a = greens::phi1(Displacement::new(dw, th).unwrap(), 1.0).unwrap();
        let b = greens::phi1(Displacement::new(dw, th + 2.0 * PI).unwrap(), 1.0).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn phi4_symmetric(w in 0.1f64..4.0, wp in 0.1f64..4.0, th in 0.05f64..3.0) {
        let a = greens::phi4(w, wp, th, 1.0).unwrap();
        let b = greens::phi4(wp, w, -th, 1.0).unwrap();
        prop_assert!((a - b).abs() <= 1e-11 * a);
    }

    #[test]
    fn near_ratio_finite(dw in 0.01f64..1.0, th in 0.0f64..3.0) {
        let params = KernelParams::new(1.0, 0.25, None).unwrap();
        let x = KernelPoint { w: dw, wp: 0.0, dtheta: th };
        let r = greens::bound_ratio(KernelId::Phi1, Regime::Near, &x, &params).unwrap();
        prop_assert!(r.is_finite());
    }
}
