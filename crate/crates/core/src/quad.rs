#![allow(clippy::excessive_precision)]

//! One-dimensional quadrature used throughout the crate.
//!
//! * [`gauss_kronrod`] / [`gauss_kronrod_points`]: globally adaptive 10/21-point
//!   Gauss–Kronrod with the QUADPACK error heuristic. Subintervals are bisected in
//!   order of decreasing error estimate.
//! * [`tanh_sinh_unit`]: double-exponential rule on `[0, 1]` for integrands with
//!   integrable power singularities at the endpoints. The integrand receives both
//!   `x` and `1 - x` so that neither loses relative precision near an endpoint.
//! * [`periodic_trapezoid`]: equispaced rule over one period, spectrally accurate
//!   for smooth periodic integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Stopping rule for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
    /// Hard cap on integrand evaluations.
    pub max_evals: usize,
}

impl QuadTol {
    pub fn new(abs: f64, rel: f64, max_evals: usize) -> Self {
        Self { abs, rel, max_evals }
    }

    pub fn rel(rel: f64) -> Self {
        Self {
            abs: 0.0,
            rel,
            max_evals: 400_000,
        }
    }

    // The per-panel error estimate has a rounding floor of 50 eps, so relative
    // requests below 100 eps are clamped.
    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel.max(100.0 * f64::EPSILON) * value.abs())
    }
}

impl Default for QuadTol {
    fn default() -> Self {
        Self::rel(1e-12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evals: usize,
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Single 21-point Kronrod panel: (integral, error estimate).
fn qk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_g = 0.0;
    let mut res_k = f_center * WGK[10];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for (j, wg) in WG.iter().enumerate() {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += wg * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (result, err)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Adaptive Gauss–Kronrod over `[a, b]`.
pub fn gauss_kronrod<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: &QuadTol) -> Result<QuadResult> {
    gauss_kronrod_points(f, &[a, b], tol)
}

/// Adaptive Gauss–Kronrod over `[points[0], points[last]]`, starting from the
/// panels delimited by `points` (must be non-decreasing; repeated points are skipped).
pub fn gauss_kronrod_points<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    tol: &QuadTol,
) -> Result<QuadResult> {
    if points.len() < 2 {
        return Err(Error::Parameter("need at least two break points".into()));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::Parameter("non-finite integration limit".into()));
    }
    if points.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Parameter("break points must be non-decreasing".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut evals = 0usize;
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in points.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let (v, e) = qk21(&mut f, w[0], w[1]);
        evals += 21;
        total += v;
        total_err += e;
        heap.push(Panel { a: w[0], b: w[1], value: v, err: e });
    }
    // Panels too narrow to bisect are parked here; their error still counts.
    let mut frozen_err = 0.0;
    let mut frozen_value = 0.0;
    loop {
        if !total.is_finite() {
            return Err(Error::NonConvergence {
                what: "gauss-kronrod (non-finite integrand)",
                budget: evals,
                estimate: total,
            });
        }
        if total_err <= tol.target(total) {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        if evals + 42 > tol.max_evals {
            return Err(Error::NonConvergence {
                what: "gauss-kronrod",
                budget: tol.max_evals,
                estimate: total_err,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 4.0 * f64::EPSILON * mid.abs().max(1e-300) {
            frozen_err += worst.err;
            frozen_value += worst.value;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let (v1, e1) = qk21(&mut f, worst.a, mid);
        let (v2, e2) = qk21(&mut f, mid, worst.b);
        evals += 42;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, err: e2 });
    }
    // Re-sum to shed the drift of the running update.
    let value: f64 = heap.iter().map(|p| p.value).sum::<f64>() + frozen_value;
    let err: f64 = heap.iter().map(|p| p.err).sum::<f64>() + frozen_err;
    Ok(QuadResult {
        value,
        abs_error: err,
        evals,
    })
}

/// Tanh–sinh quadrature of `f(x, 1 - x)` over `[0, 1]`.
///
/// Refines the step until two successive levels agree to `rel_tol`.
pub fn tanh_sinh_unit<F: FnMut(f64, f64) -> f64>(mut f: F, rel_tol: f64, max_level: usize) -> Result<QuadResult> {
    const T_MAX: f64 = 6.1;
    let pi = std::f64::consts::PI;
    let mut node = |tau: f64| -> f64 {
        let s = pi * tau.sinh();
        // x = 1/(1+e^{-s}), 1-x = 1/(1+e^{s})
        let (x, xc) = if s >= 0.0 {
            let e = (-s).exp();
            (1.0 / (1.0 + e), e / (1.0 + e))
        } else {
            let e = s.exp();
            (e / (1.0 + e), 1.0 / (1.0 + e))
        };
        if x <= 0.0 || xc <= 0.0 {
            return 0.0;
        }
        let w = pi * tau.cosh() * x * xc;
        let v = f(x, xc) * w;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mut h = 0.5;
    let mut evals = 0usize;
    let n0 = (T_MAX / h).ceil() as i64;
    let mut sum = node(0.0);
    for k in 1..=n0 {
        let t = k as f64 * h;
        sum += node(t) + node(-t);
        evals += 2;
    }
    let mut estimate = sum * h;
    for _level in 1..=max_level {
        h *= 0.5;
        let n = (T_MAX / h).ceil() as i64;
        let mut add = 0.0;
        let mut k = 1;
        while k <= n {
            let t = k as f64 * h;
            add += node(t) + node(-t);
            evals += 2;
            k += 2;
        }
        sum += add;
        let next = sum * h;
        let diff = (next - estimate).abs();
        estimate = next;
        if diff <= rel_tol * next.abs() || diff == 0.0 {
            return Ok(QuadResult {
                value: next,
                abs_error: diff,
                evals,
            });
        }
    }
    Err(Error::NonConvergence {
        what: "tanh-sinh",
        budget: evals,
        estimate,
    })
}

/// `(period / n) * sum_j f(start + j * period / n)`.
pub fn periodic_trapezoid<F: FnMut(f64) -> f64>(mut f: F, start: f64, period: f64, n: usize) -> f64 {
    let h = period / n as f64;
    (0..n).map(|j| f(start + j as f64 * h)).sum::<f64>() * h
}
