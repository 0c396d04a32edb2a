use std::f64::consts::PI;

use abmoser::cylinder::{self, CylinderGrid, SampledField};
use abmoser::sharpness::{self, AdmissibleShift, HardySobolevParams, MoserBump, EIGHT_PI_E};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn moser_energy_closed_vs_quadrature() {
    for delta in [0.3, 0.1, 0.03] {
        for lambda in [0.0, 1.0, 2.0] {
            let c = sharpness::moser_energy_closed(delta, lambda).unwrap();
            let q = sharpness::moser_energy_quadrature(delta, lambda).unwrap();
            assert!(((c - q) / c).abs() <= 1e-5, "delta={delta} lambda={lambda}");
        }
    }
}

#[test]
fn sampled_bump_energy_converges_under_refinement() {
    let bump = MoserBump::new(0.3, 0.0, 2.0).unwrap();
    let mut prev = f64::INFINITY;
    for (nw, nt) in [(241, 256), (481, 512), (961, 1024)] {
        let f = bump.sample(CylinderGrid::new(-1.2, 1.2, nw, nt, false).unwrap());
        let err = (cylinder::magnetic_energy_any_flux(&f, 0.0, 2.0).unwrap() - 1.0).abs();
        assert!(err < prev, "{nw}x{nt}: {err}");
        prev = err;
    }
    assert!(prev < 2e-2);
}

#[test]
fn threshold_gap_halves_when_delta_squares() {
    for lambda in [0.1, 1.0, 10.0] {
        let gap = |d: f64| sharpness::sharpness_threshold(d, lambda, 1.0).unwrap() - 4.0 * PI;
        for d in [1e-3, 1e-6] {
            let r = gap(d * d) / gap(d);
            assert!((0.4..=0.6).contains(&r), "lambda={lambda} delta={d}: {r}");
        }
    }
}

#[test]
fn threshold_limit_independent_of_lambda() {
    // the λ-dependence is an O(1) term against −2π ln δ, so it fades like 1/ln(1/δ)
    let spread = |ld: f64| {
        let a = sharpness::sharpness_threshold_log(ld, 10.0, 1.0).unwrap();
        let b = sharpness::sharpness_threshold_log(ld, 0.1, 1.0).unwrap();
        ((a - b) / b).abs()
    };
    let ld = (1e-12f64).ln();
    assert!(spread(2.0 * ld) < 0.6 * spread(ld));
    assert!(spread(-1e3) < 5e-3);
}

#[test]
fn subcritical_bumps_stay_bounded() {
    let deltas = [1e-2, 1e-4, 1e-6, 1e-12, 1e-24, 1e-48];
    let v = sharpness::tm_blowup_scan(2.0 * PI, 1.0, &deltas).unwrap();
    assert!(v.iter().all(|x| !x.overflowed && x.value < 2.0 * PI));
}

#[test]
fn supercritical_bumps_grow_without_bound() {
    let deltas = [1e-2, 1e-8, 1e-32, 1e-128];
    let v = sharpness::tm_blowup_scan(4.1 * PI, 1.0, &deltas).unwrap();
    for w in v.windows(2) {
        assert!(w[1].value > w[0].value);
    }
    assert!(v[3].value > 10.0 * v[0].value);
    let deep = sharpness::tm_bump_radial(5.0 * PI, 1.0, 1e-300).unwrap();
    assert!(deep.value > 1e10);
}

#[test]
fn extremal_sampled_on_cylinder_attains_mu_p() {
    let hp = HardySobolevParams::new(3.0, 0.25, 0.4).unwrap();
    let mu = sharpness::mu_p_closed(&hp).unwrap();
    let grid = CylinderGrid::new(-45.0, 45.0, 9001, 4, false).unwrap();
    let f = SampledField::from_fn(grid, |w, _| Complex64::new(hp.extremal(w).0, 0.0));
    let q = sharpness::hardy_sobolev_quotient(&f, &hp).unwrap();
    assert!(((q - mu) / mu).abs() < 1e-5, "{q} vs {mu}");
    let scaled = sharpness::hardy_sobolev_quotient(&f.scaled(Complex64::new(-3.0, 2.0)), &hp).unwrap();
    assert!(((scaled - q) / q).abs() < 1e-12);
}

fn random_field(rng: &mut ChaCha8Rng, grid: CylinderGrid) -> SampledField {
    let terms: Vec<(i64, Complex64, f64, f64)> = (-3..=3)
        .map(|m| {
            (
                m,
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(0.3..2.0),
            )
        })
        .collect();
    SampledField::from_fn(grid, |w, th| {
        terms
            .iter()
            .map(|(m, c, w0, s)| c * (-((w - w0) / s).powi(2)).exp() * Complex64::from_polar(1.0, *m as f64 * th))
            .sum()
    })
}

#[test]
fn random_fields_respect_hardy_sobolev() {
    let hp = HardySobolevParams::new(3.0, 0.25, 0.4).unwrap();
    let mu = sharpness::mu_p_closed(&hp).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let grid = CylinderGrid::new(-16.0, 16.0, 641, 32, false).unwrap();
    for _ in 0..50 {
        let q = sharpness::hardy_sobolev_quotient(&random_field(&mut rng, grid), &hp).unwrap();
        assert!(q >= mu - 1e-6);
    }
}

#[test]
fn extremal_is_stationary() {
    let hp = HardySobolevParams::new(3.0, 0.25, 0.4).unwrap();
    let base = sharpness::extremal_quotient(&hp).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..20 {
        let (c, w0, s) = (rng.gen_range(-1.0..1.0), rng.gen_range(-3.0..3.0), rng.gen_range(0.5..2.0));
        let eps = 1e-3;
        let q = sharpness::radial_quotient(
            |w| {
                let (u, du) = hp.extremal(w);
                let g = c * (-((w - w0) / s).powi(2)).exp();
                let dg = -2.0 * (w - w0) / (s * s) * g;
                (u + eps * g, du + eps * dg)
            },
            &hp,
            60.0,
        )
        .unwrap();
        let rel = (q - base) / base;
        assert!(rel >= -1e-10, "{rel}");
        assert!(rel <= 1e-4, "{rel}");
    }
}

#[test]
fn eight_pi_e_sequence() {
    let ps = [1e2, 1e3, 1e4];
    // λ + a² < 2 ln π: approached from below
    let below: Vec<f64> = ps.iter().map(|&p| sharpness::asymptotic_8pie(p, 1.0, 0.25).unwrap()).collect();
    assert!(below.windows(2).all(|w| w[1] > w[0]));
    assert!(below.iter().all(|&v| v < EIGHT_PI_E));
    assert!(((below[2] - EIGHT_PI_E) / EIGHT_PI_E).abs() < 0.01);
    // λ + a² > 2 ln π: approached from above
    let above: Vec<f64> = ps.iter().map(|&p| sharpness::asymptotic_8pie(p, 3.0, 0.25).unwrap()).collect();
    assert!(above.windows(2).all(|w| w[1] < w[0]));
    assert!(above.iter().all(|&v| v > EIGHT_PI_E));
}

#[test]
fn random_admissible_shifts_dominate() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..100 {
        let a = rng.gen_range(0.0..0.5);
        let lambda = rng.gen_range(-a * a + 1e-3..3.0);
        let c = lambda + a * a;
        let eps = if a > 0.0 { rng.gen_range(1e-3..1.0) * c / a } else { rng.gen_range(1e-3..2.0) };
        let max = c - a * eps;
        if max <= 0.0 {
            continue;
        }
        let lp = rng.gen_range(0.001..0.999) * max;
        let s = AdmissibleShift::new(a, lambda, eps, lp).unwrap();
        assert!(sharpness::mode_domination(&s).min_gap > 0.0, "{s:?}");
    }
}

proptest! {
    #[test]
    fn mu_p_rejects_outside_regime(p in 2.1f64..8.0, a in 0.01f64..0.49) {
        let hp = HardySobolevParams::new(p, a, 0.0).unwrap();
        let star = hp.lambda_star();
        let out = HardySobolevParams::new(p, a, star + 0.1).unwrap();
        prop_assert!(sharpness::mu_p_closed(&out).is_err());
        if star > -a * a {
            let inside = HardySobolevParams::new(p, a, 0.5 * (star - a * a)).unwrap();
            prop_assert!(sharpness::mu_p_closed(&inside).unwrap() > 0.0);
        }
    }

    #[test]
    fn closed_form_matches_extremal(p in 2.5f64..6.0, a in 0.05f64..0.45, frac in 0.05f64..0.95) {
        let probe = HardySobolevParams::new(p, a, 0.0).unwrap();
        let lambda = -a * a + frac * (probe.lambda_star() + a * a);
        prop_assume!(probe.lambda_star() + a * a > 0.0);
        let hp = HardySobolevParams::new(p, a, lambda).unwrap();
        let c = sharpness::mu_p_closed(&hp).unwrap();
        let q = sharpness::extremal_quotient(&hp).unwrap();
        prop_assert!(((c - q) / c).abs() < 1e-8);
    }

    #[test]
    fn gap_positive_at_every_mode(a in 0.0f64..0.5, n in -1000i64..1000) {
        let s = AdmissibleShift::new(a, 1.0, 0.5, 0.5 * (1.0 + a * a - 0.5 * a)).unwrap();
        prop_assert!(s.gap(n) > 0.0);
    }
}
