//! Heat kernels on S¹, for the perturbed angular operator `T_a`, and for the
//! half-line Hardy operator `∂_w² + 1/(4w²)`.
//!
//! `T_a` acts diagonally on angular modes with symbol
//! `s(n) = n² − 2a n²/√(n²+ε)`, so `e^{tT_a}` is a plain spectral sum.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, QuadTol};
use crate::specfun::Estimate;

/// Multiplier applied to the largest observed ratio when fitting an empirical constant.
pub const FIT_MARGIN: f64 = 1.25;

/// Wraps an angle into `[−π, π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t >= PI {
        -PI
    } else {
        t
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be positive and finite, got {t}")));
    }
    Ok(())
}

/// Cutoffs for the spectral and image sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelTruncation {
    pub n_max: usize,
    pub image_max: usize,
    /// Absolute bound required of the analytic tail majorant.
    pub tail_tol: f64,
}

impl KernelTruncation {
    pub fn new(n_max: usize, image_max: usize, tail_tol: f64) -> Result<Self> {
        if n_max == 0 || image_max == 0 || !(tail_tol > 0.0) {
            return Err(Error::Parameter("truncation cutoffs and tail_tol must be positive".into()));
        }
        Ok(Self {
            n_max,
            image_max,
            tail_tol,
        })
    }
}

impl Default for KernelTruncation {
    fn default() -> Self {
        Self {
            n_max: 2_000_000,
            image_max: 10_000,
            tail_tol: 1e-16,
        }
    }
}

/// Parameters of `T_a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaParams {
    pub a: f64,
    pub eps: f64,
}

impl TaParams {
    pub fn new(a: f64, eps: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&a) {
            return Err(Error::Parameter(format!("flux a = {a} outside [0, 1/2]")));
        }
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::Parameter(format!("eps must be positive, got {eps}")));
        }
        let p = Self { a, eps };
        if !(p.eps1() > 0.0) {
            return Err(Error::Parameter(format!("eps1 = {} is not positive", p.eps1())));
        }
        Ok(p)
    }

    /// `T_a` parameters with ε = min(1/2, (λ+a²)/(2a)).
    pub fn with_default_eps(a: f64, lambda: f64) -> Result<Self> {
        Self::new(a, default_eps(a, lambda)?)
    }

    /// `ε₁ = 1 − 2a/√(1+ε)`, the symbol at `n = ±1`.
    pub fn eps1(&self) -> f64 {
        1.0 - 2.0 * self.a / (1.0 + self.eps).sqrt()
    }

    pub fn symbol(&self, n: f64) -> f64 {
        let n2 = n * n;
        n2 - 2.0 * self.a * n2 / (n2 + self.eps).sqrt()
    }

    /// `s(n) − n² = −2a n²/√(n²+ε)`.
    fn symbol_shift(&self, n: f64) -> f64 {
        let n2 = n * n;
        -2.0 * self.a * n2 / (n2 + self.eps).sqrt()
    }
}

/// ε = min(1/2, (λ+a²)/(2a)) for a > 0, and 1/2 for a = 0.
pub fn default_eps(a: f64, lambda: f64) -> Result<f64> {
    if !(lambda + a * a > 0.0) {
        return Err(Error::Parameter(format!("need lambda + a^2 > 0 (a = {a}, lambda = {lambda})")));
    }
    if a > 0.0 {
        Ok(0.5f64.min((lambda + a * a) / (2.0 * a)))
    } else {
        Ok(0.5)
    }
}

// ---------------------------------------------------------------------------
// S¹

/// `(1/2π) Σ_n e^{−n²t} cos(nθ)` with a certified Gaussian tail.
pub fn heat_s1_spectral_truncated(t: f64, dtheta: f64, tr: &KernelTruncation) -> Result<Estimate> {
    check_time(t)?;
    let mut sum = 0.0;
    let mut n = 1usize;
    loop {
        let nf = n as f64;
        // Σ_{m ≥ n} e^{−m²t} ≤ e^{−n²t} / (1 − e^{−(2n+1)t})
        let tail = 2.0 * (-nf * nf * t).exp() / (-(-(2.0 * nf + 1.0) * t).exp_m1()) / (2.0 * PI);
        if tail <= tr.tail_tol {
            return Ok(Estimate {
                value: (1.0 + 2.0 * sum) / (2.0 * PI),
                abs_error: tail,
            });
        }
        if n > tr.n_max {
            return Err(Error::NonConvergence {
                what: "S1 spectral heat sum",
                budget: tr.n_max,
                estimate: tail,
            });
        }
        sum += (-nf * nf * t).exp() * (nf * dtheta).cos();
        n += 1;
    }
}

/// `(1/√(4πt)) Σ_n e^{−(θ−2nπ)²/4t}` with a certified Gaussian tail.
pub fn heat_s1_poisson_truncated(t: f64, dtheta: f64, tr: &KernelTruncation) -> Result<Estimate> {
    check_time(t)?;
    let th = wrap_angle(dtheta);
    let norm = 1.0 / (4.0 * PI * t).sqrt();
    let mut sum = (-th * th / (4.0 * t)).exp();
    let mut k = 1usize;
    loop {
        // images beyond k sit at distance ≥ (2k−1)π from θ on either side
        let d = (2.0 * k as f64 - 1.0) * PI;
        let g = (-d * d / (4.0 * t)).exp();
        let ratio = (-2.0 * k as f64 * PI * PI / t).exp();
        let tail = 2.0 * norm * g / (1.0 - ratio).max(f64::MIN_POSITIVE);
        if tail <= tr.tail_tol || g == 0.0 {
            return Ok(Estimate {
                value: norm * sum,
                abs_error: tail,
            });
        }
        if k > tr.image_max {
            return Err(Error::NonConvergence {
                what: "S1 Poisson image sum",
                budget: tr.image_max,
                estimate: tail,
            });
        }
        let kf = k as f64;
        let a = th - 2.0 * PI * kf;
        let b = th + 2.0 * PI * kf;
        sum += (-a * a / (4.0 * t)).exp() + (-b * b / (4.0 * t)).exp();
        k += 1;
    }
}

pub fn heat_s1_spectral(t: f64, dtheta: f64) -> Result<f64> {
    heat_s1_spectral_truncated(t, dtheta, &KernelTruncation::default()).map(|e| e.value)
}

pub fn heat_s1_poisson(t: f64, dtheta: f64) -> Result<f64> {
    heat_s1_poisson_truncated(t, dtheta, &KernelTruncation::default()).map(|e| e.value)
}

/// Heat kernel on S¹: Poisson images for t < 1, spectral sum otherwise.
pub fn heat_s1(t: f64, dtheta: f64) -> Result<f64> {
    if t < 1.0 {
        heat_s1_poisson(t, dtheta)
    } else {
        heat_s1_spectral(t, dtheta)
    }
}

/// Free heat kernel on the line, `(4πt)^{−1/2} e^{−x²/4t}`.
pub fn heat_line(t: f64, dx: f64) -> f64 {
    (-dx * dx / (4.0 * t)).exp() / (4.0 * PI * t).sqrt()
}

// ---------------------------------------------------------------------------
// T_a

fn ta_tail(t: f64, n: f64, a: f64) -> f64 {
    // s(m) ≥ m² − 2am, consecutive ratio ≤ e^{−2nt} for m ≥ n ≥ 1
    let e = (n * n - 2.0 * a * n) * t;
    2.0 * (-e).exp() / (-(-2.0 * n * t).exp_m1()) / (2.0 * PI)
}

/// `(1/2π) Σ_n e^{−s(n)t} cos(nθ)`, tail certified against `Σ e^{−(n²−2a|n|)t}`.
pub fn heat_ta_truncated(t: f64, dtheta: f64, p: &TaParams, tr: &KernelTruncation) -> Result<Estimate> {
    check_time(t)?;
    let mut sum = 0.0;
    let mut n = 1usize;
    loop {
        let nf = n as f64;
        let tail = ta_tail(t, nf, p.a);
        if tail <= tr.tail_tol {
            return Ok(Estimate {
                value: (1.0 + 2.0 * sum) / (2.0 * PI),
                abs_error: tail,
            });
        }
        if n > tr.n_max {
            return Err(Error::NonConvergence {
                what: "T_a spectral heat sum",
                budget: tr.n_max,
                estimate: tail,
            });
        }
        sum += (-p.symbol(nf) * t).exp() * (nf * dtheta).cos();
        n += 1;
    }
}

pub fn heat_ta(t: f64, dtheta: f64, p: &TaParams) -> Result<f64> {
    heat_ta_truncated(t, dtheta, p, &KernelTruncation::default()).map(|e| e.value)
}

/// `e^{tT_a} − e^{tΔ}` evaluated termwise, `(1/π) Σ_{n≥1} e^{−n²t}(e^{2an²t/√(n²+ε)} − 1) cos(nθ)`.
///
/// Avoids the cancellation of subtracting two nearly equal kernels at small t.
pub fn heat_ta_minus_s1(t: f64, dtheta: f64, p: &TaParams, tr: &KernelTruncation) -> Result<f64> {
    check_time(t)?;
    if p.a == 0.0 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    let mut n = 1usize;
    let (s1, c1) = dtheta.sin_cos();
    let (mut sp, mut cp) = (0.0, 1.0);
    loop {
        let nf = n as f64;
        if ta_tail(t, nf, p.a) <= tr.tail_tol {
            return Ok(sum / PI);
        }
        if n > tr.n_max {
            return Err(Error::NonConvergence {
                what: "T_a difference kernel",
                budget: tr.n_max,
                estimate: ta_tail(t, nf, p.a),
            });
        }
        // cos(nθ) by rotation, re-anchored periodically against drift
        let (sn, cn) = if n.is_multiple_of(64) {
            (nf * dtheta).sin_cos()
        } else {
            (sp * c1 + cp * s1, cp * c1 - sp * s1)
        };
        sp = sn;
        cp = cn;
        sum += (-nf * nf * t).exp() * (-p.symbol_shift(nf) * t).exp_m1() * cn;
        n += 1;
    }
}

/// `∫_ℝ e^{iθξ} e^{−s(ξ)t} dξ` and the two envelope bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierBounds {
    pub integral: f64,
    /// `2√π t^{−1/2} e^{a²t}`.
    pub bound1: f64,
    /// `θ^{−2} √t (1+t) e^{a²t}`; infinite at θ = 0.
    pub bound2: f64,
}

pub fn ta_fourier_bounds(t: f64, theta: f64, p: &TaParams) -> Result<FourierBounds> {
    check_time(t)?;
    let a = p.a;
    let xi_max = ((40.0 + 4.0 * a * a * t) / t).sqrt() + 2.0 * a;
    let growth = (a * a * t).exp();
    let bound1 = 2.0 * PI.sqrt() / t.sqrt() * growth;
    let bound2 = if theta == 0.0 {
        f64::INFINITY
    } else {
        t.sqrt() * (1.0 + t) * growth / (theta * theta)
    };
    // one panel per half oscillation
    let panels = ((theta.abs() * xi_max / PI).ceil() as usize).clamp(1, 100_000);
    let pts: Vec<f64> = (0..=panels).map(|k| xi_max * k as f64 / panels as f64).collect();
    let tol = QuadTol::new(1e-14 * bound1, 1e-12, 4_000_000);
    let r = quad::gauss_kronrod_points(
        |xi| (theta * xi).cos() * (-p.symbol(xi) * t).exp(),
        &pts,
        &tol,
    )?;
    Ok(FourierBounds {
        integral: 2.0 * r.value,
        bound1,
        bound2,
    })
}

/// Largest `|integral| / bound2` over the samples, times [`FIT_MARGIN`].
pub fn fit_fourier_constant(p: &TaParams, samples: &[(f64, f64)]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &(t, theta) in samples {
        if theta == 0.0 {
            continue;
        }
        let b = ta_fourier_bounds(t, theta, p)?;
        worst = worst.max(b.integral.abs() / b.bound2);
    }
    if !worst.is_finite() {
        return Err(Error::Fit("unbounded Fourier ratio".into()));
    }
    Ok(worst * FIT_MARGIN)
}

/// `|e^{tT_a} − e^{tΔ}|` against the envelope `(1+t)e^{−ε₁t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub diff: f64,
    pub envelope: f64,
}

pub fn ta_comparison(t: f64, dtheta: f64, p: &TaParams) -> Result<Comparison> {
    check_time(t)?;
    if dtheta.abs() > PI {
        return Err(Error::Domain(format!("|dtheta| = {} exceeds pi", dtheta.abs())));
    }
    let diff = heat_ta_minus_s1(t, dtheta, p, &KernelTruncation::default())?.abs();
    Ok(Comparison {
        diff,
        envelope: (1.0 + t) * (-p.eps1() * t).exp(),
    })
}

/// Largest `diff / envelope` over the training samples, times [`FIT_MARGIN`].
pub fn fit_comparison_constant(p: &TaParams, training: &[(f64, f64)]) -> Result<f64> {
    if training.is_empty() {
        return Err(Error::Fit("empty training grid".into()));
    }
    let mut worst: f64 = 0.0;
    for &(t, th) in training {
        let c = ta_comparison(t, th, p)?;
        worst = worst.max(c.diff / c.envelope);
    }
    if !worst.is_finite() {
        return Err(Error::Fit("unbounded comparison ratio".into()));
    }
    Ok(worst * FIT_MARGIN)
}

/// Applies `T_a` to equispaced periodic samples (`θ_j = 2πj/N`).
pub fn ta_apply(samples: &[Complex64], p: &TaParams) -> Vec<Complex64> {
    let n = samples.len();
    if n == 0 {
        return Vec::new();
    }
    let mut planner = FftPlanner::new();
    let mut buf = samples.to_vec();
    planner.plan_fft_forward(n).process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let m = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
        *c *= -p.symbol(m) / n as f64;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf
}

// ---------------------------------------------------------------------------
// half-line Hardy

/// Kernel of `e^{t(∂_w² + 1/(4w²))}` on (0, ∞):
/// `(√(ww')/4πt) ∫₀^{2π} e^{−(w²+w'²−2ww'cos ϑ)/4t} dϑ`.
pub fn heat_halfline_hardy(t: f64, w: f64, wp: f64) -> Result<f64> {
    check_time(t)?;
    if !(w > 0.0 && wp > 0.0) {
        return Err(Error::Domain(format!("need w, w' > 0 (got {w}, {wp})")));
    }
    // exponent = −(w−w')²/4t − x(1 − cos ϑ) with x = ww'/2t
    let x = w * wp / (2.0 * t);
    let d = w - wp;
    let angular = periodic_bessel_integral(x)?;
    Ok((w * wp).sqrt() / (4.0 * PI * t) * (-d * d / (4.0 * t)).exp() * angular)
}

const BESSEL_SERIES_FROM: f64 = 64.0;

/// `∫₀^{2π} e^{−x(1−cos ϑ)} dϑ = 2π e^{−x} I₀(x)`: doubling periodic trapezoid rule,
/// or the large-argument series once the peak at ϑ = 0 gets narrow.
fn periodic_bessel_integral(x: f64) -> Result<f64> {
    if x > BESSEL_SERIES_FROM {
        return Ok(scaled_bessel_i0_series(x));
    }
    periodic_bessel_trapezoid(x)
}

/// `√(2π/x) Σ_k ((2k−1)!!)² / (k! (8x)^k)`.
fn scaled_bessel_i0_series(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= (2.0 * kf - 1.0).powi(2) / (kf * 8.0 * x);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    (2.0 * PI / x).sqrt() * sum
}

fn periodic_bessel_trapezoid(x: f64) -> Result<f64> {
    let f = |th: f64| (-x * 2.0 * (0.5 * th).sin().powi(2)).exp();
    let mut n = 16usize;
    let mut prev = quad::periodic_trapezoid(f, -PI, 2.0 * PI, n);
    while n < (1 << 22) {
        n *= 2;
        let cur = quad::periodic_trapezoid(f, -PI, 2.0 * PI, n);
        if (cur - prev).abs() <= 16.0 * f64::EPSILON * cur.abs() {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NonConvergence {
        what: "periodic trapezoid",
        budget: n,
        estimate: prev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_integral_branches_meet() {
        for x in [BESSEL_SERIES_FROM, 100.0, 400.0] {
            let a = periodic_bessel_trapezoid(x).unwrap();
            let b = scaled_bessel_i0_series(x);
            assert!(((a - b) / b).abs() < 1e-14, "{x}: {a} {b}");
        }
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), -PI);
        assert!((wrap_angle(3.0 * PI + 0.5) - (-PI + 0.5)).abs() < 1e-14);
        assert!((wrap_angle(-0.25) + 0.25).abs() < 1e-16);
    }

    #[test]
    fn spectral_large_time_is_uniform() {
        let v = heat_s1_spectral(60.0, 1.3).unwrap();
        assert!((v - 1.0 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn diagonal_values_at_unit_time() {
        let s: f64 = (-30i32..=30).map(|n| (-(n * n) as f64).exp()).sum();
        assert!((heat_s1_spectral(1.0, 0.0).unwrap() - s / (2.0 * PI)).abs() < 1e-15);
        let p: f64 = (-5i32..=5).map(|n| (-((n * n) as f64) * PI * PI).exp()).sum();
        assert!((heat_s1_poisson(1.0, 0.0).unwrap() - p / (4.0 * PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn representations_agree() {
        for &t in &[0.01, 0.1, 0.2, 0.5, 1.0, 10.0] {
            for j in 0..64 {
                let th = -PI + 2.0 * PI * j as f64 / 64.0;
                let a = heat_s1_spectral(t, th).unwrap();
                let b = heat_s1_poisson(t, th).unwrap();
                assert!((a - b).abs() <= 1e-12, "t={t} th={th}");
            }
        }
    }

    #[test]
    fn poisson_short_time_far_angle_vanishes() {
        assert!(heat_s1_poisson(1e-3, PI).unwrap() < 1e-200);
        assert!(heat_s1_poisson(1e-3, PI).unwrap() >= 0.0);
    }

    #[test]
    fn nonpositive_time_rejected() {
        assert!(matches!(heat_s1_spectral(0.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(heat_s1_poisson(-1.0, 0.0), Err(Error::Domain(_))));
        let p = TaParams::new(0.25, 0.5).unwrap();
        assert!(heat_ta(0.0, 0.0, &p).is_err());
        assert!(heat_halfline_hardy(1.0, 0.0, 1.0).is_err());
        assert!(heat_halfline_hardy(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn ta_params_validation_and_eps1() {
        assert!(TaParams::new(0.6, 0.1).is_err());
        assert!(TaParams::new(0.25, 0.0).is_err());
        let p = TaParams::new(0.5, 0.1).unwrap();
        assert!((p.eps1() - (1.0 - 1.0 / 1.1f64.sqrt())).abs() < 1e-15);
        assert_eq!(p.symbol(0.0), 0.0);
        assert!((default_eps(0.5, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((default_eps(0.5, -0.2).unwrap() - 0.05).abs() < 1e-15);
        assert!(default_eps(0.5, -0.3).is_err());
    }

    #[test]
    fn ta_small_flux_matches_s1() {
        let p = TaParams::new(1e-8, 0.5).unwrap();
        for &t in &[0.05, 0.3, 1.0, 4.0] {
            for &th in &[0.0, 0.7, -2.0] {
                let a = heat_ta(t, th, &p).unwrap();
                let b = heat_s1_spectral(t, th).unwrap();
                assert!((a - b).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn ta_symmetric_and_uniform_limit() {
        let p = TaParams::new(0.5, 0.1).unwrap();
        let a = heat_ta(0.3, 1.1, &p).unwrap();
        let b = heat_ta(0.3, -1.1, &p).unwrap();
        assert!((a - b).abs() < 1e-15);
        let v = heat_ta(5000.0, 0.4, &p).unwrap();
        assert!((v - 1.0 / (2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn ta_unit_time_reference_sum() {
        let p = TaParams::new(0.5, 0.1).unwrap();
        let reference: f64 = (1..2000).map(|n| (-p.symbol(n as f64)).exp()).sum::<f64>();
        let reference = (1.0 + 2.0 * reference) / (2.0 * PI);
        let e = heat_ta_truncated(1.0, 0.0, &p, &KernelTruncation::default()).unwrap();
        assert!((e.value - reference).abs() < 1e-14);
        assert!(e.abs_error <= 1e-16);
    }

    #[test]
    fn difference_kernel_matches_subtraction() {
        let p = TaParams::new(0.4, 0.3).unwrap();
        for &t in &[0.5, 1.0, 3.0] {
            for &th in &[0.0, 1.0, 2.5] {
                let direct = heat_ta(t, th, &p).unwrap() - heat_s1_spectral(t, th).unwrap();
                let d = heat_ta_minus_s1(t, th, &p, &KernelTruncation::default()).unwrap();
                assert!((d - direct).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn fourier_free_case_is_gaussian() {
        let p = TaParams::new(0.0, 0.5).unwrap();
        for &(t, th) in &[(1.0, 0.0), (0.5, 2.0), (2.0, 10.0), (0.1, 0.3)] {
            let b = ta_fourier_bounds(t, th, &p).unwrap();
            let exact = (PI / t).sqrt() * (-th * th / (4.0 * t)).exp();
            assert!((b.integral - exact).abs() < 1e-12 * (PI / t).sqrt(), "{t} {th}");
        }
    }

    #[test]
    fn fourier_bound1_holds() {
        let p = TaParams::new(0.25, 0.5).unwrap();
        let b = ta_fourier_bounds(1.0, 0.0, &p).unwrap();
        assert!(b.integral > 0.0);
        assert!(b.integral <= b.bound1);
        assert!(b.bound2.is_infinite());
    }

    #[test]
    fn halfline_symmetry_and_short_time() {
        let a = heat_halfline_hardy(0.7, 1.0, 2.0).unwrap();
        let b = heat_halfline_hardy(0.7, 2.0, 1.0).unwrap();
        assert!((a - b).abs() < 1e-15 * a);
        let t = 1e-4;
        let v = heat_halfline_hardy(t, 1.0, 1.0).unwrap();
        assert!((v * (4.0 * PI * t).sqrt() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn halfline_unit_values() {
        let direct = quad::gauss_kronrod(
            |th| (-(2.0 - 2.0 * th.cos()) / 4.0).exp(),
            0.0,
            2.0 * PI,
            &QuadTol::rel(1e-14),
        )
        .unwrap()
        .value
            / (4.0 * PI);
        let v = heat_halfline_hardy(1.0, 1.0, 1.0).unwrap();
        assert!((v - direct).abs() < 1e-14);
    }

    #[test]
    fn ta_apply_matches_symbol_on_single_modes() {
        let p = TaParams::new(0.3, 0.2).unwrap();
        let n = 32;
        for m in [-5i32, 0, 1, 7] {
            let s: Vec<Complex64> = (0..n)
                .map(|j| Complex64::from_polar(1.0, m as f64 * 2.0 * PI * j as f64 / n as f64))
                .collect();
            let out = ta_apply(&s, &p);
            for (o, x) in out.iter().zip(&s) {
                assert!((o - x * (-p.symbol(m as f64))).norm() < 1e-12);
            }
        }
    }
}
