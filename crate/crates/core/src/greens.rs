//! Kernels of the inverse square roots
//!
//! * `φ₁ = (−∂_w² − Δ_{S¹} + λ)^{−1/2}` on ℝ×S¹,
//! * `φ₂ = (−∂_w² − T_a + λ)^{−1/2}` on ℝ×S¹,
//! * `φ₄ = (−∂_w² − 1/(4w²) − Δ_{S¹} + λ)^{−1/2}` on (0,∞)×S¹,
//! * `φ₅ = (−∂_w² − 1/(4w²) − T_a + λ)^{−1/2}` on (0,∞)×S¹,
//!
//! all defined through `A^{−1/2} = Γ(1/2)^{−1} ∫₀^∞ t^{−1/2} e^{−tA} dt`. `φ₁` and `φ₄`
//! have closed forms (image sums of `K_{1/2}` and ϑ-integrals of `K₁`). `φ₂` and `φ₅`
//! are the closed form of their `T_a = Δ` counterpart plus the Laplace transform
//! of the difference kernel `e^{tT_a} − e^{tΔ}`, integrated after `t = s²`.
//!
//! Bound certificates are empirical: a constant is fitted on a training grid and
//! checked on a disjoint held-out grid. They are reproducible, not proofs.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::heatkernels::{self, KernelTruncation, TaParams, FIT_MARGIN};
use crate::quad::{self, QuadTol};
use crate::specfun::{self, BesselArgs, EvalPolicy, HypergeometricArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelId {
    Phi1,
    Phi2,
    Phi4,
    Phi5,
}

impl KernelId {
    pub const ALL: [KernelId; 4] = [KernelId::Phi1, KernelId::Phi2, KernelId::Phi4, KernelId::Phi5];

    pub fn name(self) -> &'static str {
        match self {
            KernelId::Phi1 => "phi1",
            KernelId::Phi2 => "phi2",
            KernelId::Phi4 => "phi4",
            KernelId::Phi5 => "phi5",
        }
    }

    /// Kernels living on the half cylinder (0,∞)×S¹.
    pub fn half_line(self) -> bool {
        matches!(self, KernelId::Phi4 | KernelId::Phi5)
    }

    /// Kernels built on `T_a` rather than `Δ_{S¹}`.
    pub fn uses_ta(self) -> bool {
        matches!(self, KernelId::Phi2 | KernelId::Phi5)
    }

    /// Far-field exponential rate: `√λ` on the full cylinder, `√λ/2` on the half cylinder.
    pub fn decay_rate(self, lambda: f64) -> f64 {
        if self.half_line() {
            0.5 * lambda.sqrt()
        } else {
            lambda.sqrt()
        }
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelId::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown kernel '{s}'")))
    }
}

/// `(w − w', θ − θ')` with the angle wrapped into `[−π, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Displacement {
    pub dw: f64,
    pub dtheta: f64,
}

impl Displacement {
    pub fn new(dw: f64, dtheta: f64) -> Result<Self> {
        if !dw.is_finite() || !dtheta.is_finite() {
            return Err(Error::Domain("non-finite displacement".into()));
        }
        Ok(Self {
            dw,
            dtheta: heatkernels::wrap_angle(dtheta),
        })
    }

    pub fn is_diagonal(&self) -> bool {
        self.dw == 0.0 && self.dtheta == 0.0
    }

    pub fn rho(&self) -> f64 {
        self.dw.hypot(self.dtheta)
    }

    /// Distance to the `n`-th periodic image, `√(dw² + (dθ − 2nπ)²)`.
    pub fn image_rho(&self, n: i64) -> f64 {
        self.dw.hypot(self.dtheta - 2.0 * PI * n as f64)
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Parameter(format!("lambda must be positive, got {lambda}")));
    }
    Ok(())
}

fn check_half_line(w: f64, wp: f64) -> Result<()> {
    if !(w > 0.0 && wp > 0.0) || !w.is_finite() || !wp.is_finite() {
        return Err(Error::Domain(format!("need w, w' > 0 (got {w}, {wp})")));
    }
    Ok(())
}

const IMAGE_REL_TOL: f64 = 1e-17;

// ---------------------------------------------------------------------------
// φ₁

/// `(1/2π) Σ_n e^{−√λ ρ_n}/ρ_n` with a geometric tail bound on the images.
pub fn phi1(d: Displacement, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if d.is_diagonal() {
        return Err(Error::OnDiagonal);
    }
    let root = lambda.sqrt();
    let term = |r: f64| (-root * r).exp() / r / (2.0 * PI);
    let ratio = (-2.0 * PI * root).exp();
    let mut sum = term(d.rho());
    let trunc = KernelTruncation::default();
    for k in 1..=trunc.image_max as i64 {
        // images from k on are at distance ≥ r_k on both sides
        let r_k = d.dw.hypot((2.0 * k as f64 - 1.0) * PI);
        let tail = 2.0 * term(r_k) / (1.0 - ratio);
        if tail <= IMAGE_REL_TOL * sum {
            return Ok(sum);
        }
        sum += term(d.image_rho(k)) + term(d.image_rho(-k));
    }
    Err(Error::NonConvergence {
        what: "phi1 image sum",
        budget: trunc.image_max,
        estimate: sum,
    })
}

/// `φ₁` with exactly the images `|n| ≤ image_max`.
pub fn phi1_truncated(d: Displacement, lambda: f64, image_max: usize) -> Result<f64> {
    check_lambda(lambda)?;
    if d.is_diagonal() {
        return Err(Error::OnDiagonal);
    }
    let root = lambda.sqrt();
    let m = image_max as i64;
    Ok((-m..=m)
        .map(|n| {
            let r = d.image_rho(n);
            (-root * r).exp() / r
        })
        .sum::<f64>()
        / (2.0 * PI))
}

/// `(2/√π) ∫₀^∞ e^{−λs²} H(s²) ds`, i.e. `Γ(1/2)^{−1} ∫₀^∞ t^{−1/2} e^{−λt} H(t) dt`.
///
/// `gauss_rho` is the distance in a factor `e^{−ρ²/4t}` of `H` (0 if there is none)
/// and sets the negligible lower cutoff; `scale` seeds geometric break points.
fn laplace_half<H: FnMut(f64) -> Result<f64>>(mut h: H, lambda: f64, gauss_rho: f64, scale: f64) -> Result<f64> {
    let root = lambda.sqrt();
    let s_max = ((root * gauss_rho + 45.0) / lambda).sqrt();
    let lo = if gauss_rho > 0.0 {
        gauss_rho / (2.0 * (root * gauss_rho + 45.0).sqrt())
    } else {
        0.0
    };
    let mut pts = vec![lo, s_max];
    if gauss_rho > 0.0 {
        pts.push(0.5 * gauss_rho);
        pts.push((gauss_rho / (2.0 * root)).sqrt());
    }
    let mut s = (scale / 16.0).max(lo);
    while s > 0.0 && s < s_max {
        pts.push(s);
        s *= 4.0;
    }
    pts.retain(|p| *p >= lo && *p <= s_max);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut failure = None;
    let r = quad::gauss_kronrod_points(
        |s| {
            if failure.is_some() || s == 0.0 {
                return 0.0;
            }
            match h(s * s) {
                Ok(v) => (-lambda * s * s).exp() * v,
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        &pts,
        &QuadTol::new(0.0, 1e-11, 2_000_000),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(2.0 / PI.sqrt() * r.value)
}

/// `φ₁` from its definition: Laplace quadrature of the line and S¹ heat kernels.
pub fn phi1_laplace(d: Displacement, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if d.is_diagonal() {
        return Err(Error::OnDiagonal);
    }
    let rho = d.rho();
    laplace_half(
        |t| Ok(heatkernels::heat_line(t, d.dw) * heatkernels::heat_s1(t, d.dtheta)?),
        lambda,
        rho,
        rho,
    )
}

// ---------------------------------------------------------------------------
// φ₂

/// `φ₂ − φ₁`, the Laplace transform of `heat_line · (e^{tT_a} − e^{tΔ})`.
pub fn phi2_correction(d: Displacement, lambda: f64, p: &TaParams) -> Result<f64> {
    check_lambda(lambda)?;
    if d.is_diagonal() {
        return Err(Error::OnDiagonal);
    }
    let tr = KernelTruncation::default();
    laplace_half(
        |t| Ok(heatkernels::heat_line(t, d.dw) * heatkernels::heat_ta_minus_s1(t, d.dtheta, p, &tr)?),
        lambda,
        d.dw.abs(),
        d.rho(),
    )
}

pub fn phi2(d: Displacement, lambda: f64, p: &TaParams) -> Result<f64> {
    Ok(phi1(d, lambda)? + phi2_correction(d, lambda, p)?)
}

/// `(φ₂ − φ₁) / K₀(√λ|Δw|)`; the correction is log-singular on the diagonal.
pub fn domination_ratio(d: Displacement, lambda: f64, p: &TaParams) -> Result<f64> {
    if d.dw == 0.0 {
        return Err(Error::Domain("domination ratio needs dw != 0".into()));
    }
    let k0 = specfun::bessel_k(BesselArgs::new(0.0, lambda.sqrt() * d.dw.abs())?, &EvalPolicy::default())?;
    Ok(phi2_correction(d, lambda, p)? / k0)
}

/// Fitted `C'` with `φ₂ ≤ φ₁ + C' K₀(√λ|Δw|)` on the training points.
pub fn fit_domination_constant(params: &KernelParams, training: &[Displacement]) -> Result<f64> {
    if training.is_empty() {
        return Err(Error::Fit("empty training grid".into()));
    }
    let mut worst = f64::NEG_INFINITY;
    for d in training {
        let r = domination_ratio(*d, params.lambda, &params.ta)?;
        if !r.is_finite() {
            return Err(Error::Fit(format!("unbounded domination ratio at {d:?}")));
        }
        worst = worst.max(r);
    }
    Ok(fit_constant(worst))
}

// ---------------------------------------------------------------------------
// φ₄, φ₅

/// `∫₀^π √(ww') / (w² + w'² − 2ww' cos ϑ + Δθ²) dϑ` in closed form.
pub fn theta_weight_closed(w: f64, wp: f64, dtheta: f64) -> f64 {
    let plus = (w + wp).hypot(dtheta);
    let minus = (w - wp).hypot(dtheta);
    PI * (w * wp).sqrt() / (plus * minus)
}

fn vartheta_points(w: f64, wp: f64, rho: f64) -> Vec<f64> {
    // the integrand varies on the scale ϑ ≈ ρ/√(ww') near ϑ = 0
    let c = rho / (w * wp).sqrt();
    let mut pts = vec![0.0, PI];
    for m in [0.25, 1.0, 4.0, 16.0] {
        if c * m < PI {
            pts.push(c * m);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// The same ϑ-integral by adaptive quadrature.
pub fn theta_weight_quadrature(w: f64, wp: f64, dtheta: f64) -> Result<f64> {
    check_half_line(w, wp)?;
    let rho = (w - wp).hypot(dtheta);
    if rho == 0.0 {
        return Err(Error::OnDiagonal);
    }
    let s = (w * wp).sqrt();
    let r = quad::gauss_kronrod_points(
        |th| {
            let sin = (0.5 * th).sin();
            s / (rho * rho + 4.0 * w * wp * sin * sin)
        },
        &vartheta_points(w, wp, rho),
        &QuadTol::rel(1e-13),
    )?;
    Ok(r.value)
}

/// The same ϑ-integral via `π√(ww')/A · (1−z)^{−1/2} F(0, 1/2; 1; z)`,
/// `A = (w+w')² + Δθ²`, `z = 4ww'/A`.
pub fn theta_weight_hypergeometric(w: f64, wp: f64, dtheta: f64, policy: &EvalPolicy) -> Result<f64> {
    check_half_line(w, wp)?;
    let big_a = (w + wp).powi(2) + dtheta * dtheta;
    let one_minus_z = ((w - wp).powi(2) + dtheta * dtheta) / big_a;
    if one_minus_z == 0.0 {
        return Err(Error::OnDiagonal);
    }
    let z = (4.0 * w * wp / big_a).min(1.0 - f64::EPSILON);
    let f = specfun::hyp2f1(HypergeometricArgs::new(0.0, 0.5, 1.0, z)?, policy)?;
    Ok(PI * (w * wp).sqrt() / big_a / one_minus_z.sqrt() * f)
}

/// `∫₀^π K₁(√λ R)/R dϑ` with `R² = (w−w')² + 4ww' sin²(ϑ/2) + Δ²`.
fn phi4_image_integral(w: f64, wp: f64, delta: f64, lambda: f64, policy: &EvalPolicy) -> Result<f64> {
    let root = lambda.sqrt();
    let rho = (w - wp).hypot(delta);
    let mut failure = None;
    let r = quad::gauss_kronrod_points(
        |th| {
            let sin = (0.5 * th).sin();
            let r = (rho * rho + 4.0 * w * wp * sin * sin).sqrt();
            match BesselArgs::new(1.0, root * r).and_then(|a| specfun::bessel_k(a, policy)) {
                Ok(k) => k / r,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        &vartheta_points(w, wp, rho),
        &QuadTol::new(1e-300, 1e-12, 2_000_000),
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(r.value),
    }
}

/// `φ₄` split into the direct term (`n = 0`) and the periodic images (`n ≠ 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phi4Split {
    pub total: f64,
    pub direct: f64,
    pub images: f64,
}

/// `(√λ/π²) √(ww') Σ_n ∫₀^π K₁(√λ R_n)/R_n dϑ`.
pub fn phi4_split(w: f64, wp: f64, dtheta: f64, lambda: f64) -> Result<Phi4Split> {
    check_lambda(lambda)?;
    check_half_line(w, wp)?;
    let dtheta = heatkernels::wrap_angle(dtheta);
    if w == wp && dtheta == 0.0 {
        return Err(Error::OnDiagonal);
    }
    let policy = EvalPolicy::default();
    let root = lambda.sqrt();
    let pre = root / (PI * PI) * (w * wp).sqrt();
    let direct = pre * phi4_image_integral(w, wp, dtheta, lambda, &policy)?;
    let ratio = (-2.0 * PI * root).exp();
    let mut images = 0.0;
    let trunc = KernelTruncation::default();
    for k in 1..=trunc.image_max as i64 {
        // ∫ K₁(√λR)/R ≤ π K₁(√λ r)/r for R ≥ r, and K₁ decays at least like e^{−x}
        let r_k = (w - wp).hypot((2.0 * k as f64 - 1.0) * PI);
        let k1 = specfun::bessel_k(BesselArgs::new(1.0, root * r_k)?, &policy)?;
        let tail = 2.0 * pre * PI * k1 / r_k / (1.0 - ratio);
        if tail <= IMAGE_REL_TOL * (direct + images) {
            return Ok(Phi4Split {
                total: direct + images,
                direct,
                images,
            });
        }
        let kf = k as f64;
        images += pre
            * (phi4_image_integral(w, wp, dtheta - 2.0 * PI * kf, lambda, &policy)?
                + phi4_image_integral(w, wp, dtheta + 2.0 * PI * kf, lambda, &policy)?);
    }
    Err(Error::NonConvergence {
        what: "phi4 image sum",
        budget: trunc.image_max,
        estimate: direct + images,
    })
}

pub fn phi4(w: f64, wp: f64, dtheta: f64, lambda: f64) -> Result<f64> {
    phi4_split(w, wp, dtheta, lambda).map(|s| s.total)
}

/// `φ₄` from its definition: Laplace quadrature of the half-line Hardy and S¹ heat kernels.
pub fn phi4_laplace(w: f64, wp: f64, dtheta: f64, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    check_half_line(w, wp)?;
    let dtheta = heatkernels::wrap_angle(dtheta);
    let rho = (w - wp).hypot(dtheta);
    if rho == 0.0 {
        return Err(Error::OnDiagonal);
    }
    laplace_half(
        |t| Ok(heatkernels::heat_halfline_hardy(t, w, wp)? * heatkernels::heat_s1(t, dtheta)?),
        lambda,
        rho,
        rho,
    )
}

/// `φ₅ − φ₄`, the Laplace transform of the half-line Hardy kernel times `e^{tT_a} − e^{tΔ}`.
pub fn phi5_correction(w: f64, wp: f64, dtheta: f64, lambda: f64, p: &TaParams) -> Result<f64> {
    check_lambda(lambda)?;
    check_half_line(w, wp)?;
    let dtheta = heatkernels::wrap_angle(dtheta);
    let rho = (w - wp).hypot(dtheta);
    if rho == 0.0 {
        return Err(Error::OnDiagonal);
    }
    let tr = KernelTruncation::default();
    laplace_half(
        |t| Ok(heatkernels::heat_halfline_hardy(t, w, wp)? * heatkernels::heat_ta_minus_s1(t, dtheta, p, &tr)?),
        lambda,
        (w - wp).abs(),
        rho,
    )
}

pub fn phi5(w: f64, wp: f64, dtheta: f64, lambda: f64, p: &TaParams) -> Result<f64> {
    Ok(phi4(w, wp, dtheta, lambda)? + phi5_correction(w, wp, dtheta, lambda, p)?)
}

// ---------------------------------------------------------------------------
// certificates

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `|Δw| ≤ 1`.
    Near,
    /// `|Δw| ≥ 1`.
    Far,
}

/// Kernel argument `(w, w', θ − θ')`. Full-cylinder kernels use only `w − w'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelPoint {
    pub w: f64,
    pub wp: f64,
    pub dtheta: f64,
}

impl KernelPoint {
    pub fn dw(&self) -> f64 {
        self.w - self.wp
    }

    pub fn rho(&self) -> f64 {
        self.dw().hypot(self.dtheta)
    }
}

/// Physical parameters shared by the kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub lambda: f64,
    pub ta: TaParams,
    /// Exponent δ₃ of the near-field correction for `φ₂`, `φ₅`.
    pub delta3: f64,
}

impl KernelParams {
    pub fn new(lambda: f64, a: f64, eps: Option<f64>) -> Result<Self> {
        check_lambda(lambda)?;
        let eps = match eps {
            Some(e) => e,
            None => heatkernels::default_eps(a, lambda)?,
        };
        Ok(Self {
            lambda,
            ta: TaParams::new(a, eps)?,
            delta3: 0.25,
        })
    }

    pub fn with_delta3(mut self, delta3: f64) -> Result<Self> {
        if !(delta3 > 0.0 && delta3 < 0.5) {
            return Err(Error::Parameter(format!("delta3 must lie in (0, 1/2), got {delta3}")));
        }
        self.delta3 = delta3;
        Ok(self)
    }
}

/// Evaluates any of the four kernels at a point.
pub fn evaluate(kernel: KernelId, x: &KernelPoint, params: &KernelParams) -> Result<f64> {
    match kernel {
        KernelId::Phi1 => phi1(Displacement::new(x.dw(), x.dtheta)?, params.lambda),
        KernelId::Phi2 => phi2(Displacement::new(x.dw(), x.dtheta)?, params.lambda, &params.ta),
        KernelId::Phi4 => phi4(x.w, x.wp, x.dtheta, params.lambda),
        KernelId::Phi5 => phi5(x.w, x.wp, x.dtheta, params.lambda, &params.ta),
    }
}

fn correction_exponent(kernel: KernelId, regime: Regime, params: &KernelParams) -> f64 {
    if regime == Regime::Near && kernel.uses_ta() {
        params.delta3
    } else {
        0.0
    }
}

/// The quantity a certificate bounds:
/// near `(|φ| − 1/(2πρ))·|Δw|^{c}`, far `|φ|·e^{δ|Δw|}`.
pub fn bound_ratio(kernel: KernelId, regime: Regime, x: &KernelPoint, params: &KernelParams) -> Result<f64> {
    let v = evaluate(kernel, x, params)?.abs();
    let dw = x.dw().abs();
    Ok(match regime {
        Regime::Near => {
            let c = correction_exponent(kernel, regime, params);
            (v - 1.0 / (2.0 * PI * x.rho())) * dw.powf(c)
        }
        Regime::Far => v * (kernel.decay_rate(params.lambda) * dw).exp(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub kernel: KernelId,
    pub regime: Regime,
    pub params: KernelParams,
    /// Coefficient of the `1/ρ` singularity (near regime), 0 far.
    pub leading_coeff: f64,
    /// Power of `|Δw|` multiplying the near-field remainder.
    pub correction_exponent: f64,
    pub decay_rate: f64,
    pub fitted_constant: f64,
    /// Largest ratio observed on the training grid.
    pub sample_report: f64,
    pub training_grid: Vec<KernelPoint>,
    pub grid_hash: String,
}

/// Canonical training and held-out grids for a kernel and regime; the held-out
/// points interleave the training points and never coincide with them.
pub fn default_grids(kernel: KernelId, regime: Regime) -> (Vec<KernelPoint>, Vec<KernelPoint>) {
    let (train_dw, held_dw): (Vec<f64>, Vec<f64>) = match regime {
        Regime::Near => (
            (0..=8).map(|k| 10f64.powf(-2.0 + k as f64 / 4.0)).collect(),
            (0..8).map(|k| 10f64.powf(-2.0 + (k as f64 + 0.5) / 4.0)).collect(),
        ),
        Regime::Far => (
            vec![1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0],
            vec![1.25, 1.75, 2.5, 3.5, 4.5, 5.5, 7.0],
        ),
    };
    let train_th = [0.0, 0.4, 1.2, 2.6];
    let held_th = [0.2, 0.8, 1.9, 3.1];
    let base = match (kernel.half_line(), regime) {
        (false, _) => 0.0,
        (true, Regime::Near) => 2.0,
        (true, Regime::Far) => 1.0,
    };
    let build = |dws: &[f64], ths: &[f64]| {
        let mut v = Vec::new();
        for &dw in dws {
            for &th in ths {
                v.push(KernelPoint {
                    w: base + dw,
                    wp: base,
                    dtheta: th,
                });
            }
        }
        v
    };
    (build(&train_dw, &train_th), build(&held_dw, &held_th))
}

fn grid_hash(kernel: KernelId, regime: Regime, params: &KernelParams, grid: &[KernelPoint]) -> Result<String> {
    let payload = serde_json::to_vec(&(kernel, regime, params, grid))?;
    Ok(hex::encode(Sha256::digest(&payload)))
}

fn fit_constant(max_ratio: f64) -> f64 {
    max_ratio + (FIT_MARGIN - 1.0) * max_ratio.abs()
}

/// Fits a certificate on the default training grid.
pub fn certify_bounds(kernel: KernelId, regime: Regime, params: &KernelParams) -> Result<BoundCertificate> {
    certify_bounds_on(kernel, regime, params, default_grids(kernel, regime).0)
}

/// Fits a certificate on an explicit training grid.
pub fn certify_bounds_on(
    kernel: KernelId,
    regime: Regime,
    params: &KernelParams,
    training: Vec<KernelPoint>,
) -> Result<BoundCertificate> {
    if training.is_empty() {
        return Err(Error::Fit("empty training grid".into()));
    }
    let mut worst = f64::NEG_INFINITY;
    for x in &training {
        check_regime(regime, x)?;
        let r = bound_ratio(kernel, regime, x, params)?;
        if !r.is_finite() {
            return Err(Error::Fit(format!("{kernel} {regime:?}: unbounded ratio at {x:?}")));
        }
        worst = worst.max(r);
    }
    Ok(BoundCertificate {
        kernel,
        regime,
        params: *params,
        leading_coeff: if regime == Regime::Near { 1.0 / (2.0 * PI) } else { 0.0 },
        correction_exponent: correction_exponent(kernel, regime, params),
        decay_rate: kernel.decay_rate(params.lambda),
        fitted_constant: fit_constant(worst),
        sample_report: worst,
        grid_hash: grid_hash(kernel, regime, params, &training)?,
        training_grid: training,
    })
}

fn check_regime(regime: Regime, x: &KernelPoint) -> Result<()> {
    let dw = x.dw().abs();
    let ok = match regime {
        Regime::Near => dw <= 1.0,
        Regime::Far => dw >= 1.0,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Parameter(format!("point {x:?} outside the {regime:?} regime")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub max_ratio: f64,
    pub fitted_constant: f64,
    pub points: usize,
    pub holds: bool,
}

/// Re-evaluates the certified ratio on points the fit never saw.
pub fn verify_certificate(cert: &BoundCertificate, held_out: &[KernelPoint]) -> Result<Verification> {
    if held_out.is_empty() {
        return Err(Error::Fit("empty verification grid".into()));
    }
    if held_out.iter().any(|x| cert.training_grid.contains(x)) {
        return Err(Error::Fit("verification grid overlaps the training grid".into()));
    }
    let mut worst = f64::NEG_INFINITY;
    for x in held_out {
        check_regime(cert.regime, x)?;
        worst = worst.max(bound_ratio(cert.kernel, cert.regime, x, &cert.params)?);
    }
    Ok(Verification {
        max_ratio: worst,
        fitted_constant: cert.fitted_constant,
        points: held_out.len(),
        holds: worst <= cert.fitted_constant,
    })
}

fn find_cert(kernel: KernelId, regime: Regime, certs: &[BoundCertificate]) -> Result<&BoundCertificate> {
    certs
        .iter()
        .find(|c| c.kernel == kernel && c.regime == regime)
        .ok_or_else(|| Error::Parameter(format!("missing {regime:?} certificate for {kernel}")))
}

/// Analytic envelope for the rearrangement of a kernel built from its certificates.
///
/// * `φ₁`, `φ₄`: bound on `f*`, `1/√(4πt) + A₂` for `t ≤ 1` with
///   `A₂ = max(A_near, C_far e^{−δ})`.
/// * `φ₂`, `φ₅`: bound on `f**` for `t ≤ 1`,
///   `1/√(πt) + A₃⁺ (4π)^{δ₃} t^{−δ₃}/(1−δ₃) + C_far e^{−δ}`.
/// * all kernels, `t > 1`: bound on `f*`, `K e^{−δt/(4π)}` with
///   `K = e^{δ} max(B₁, C_far)` and `B₁` the `t = 1` value of the short-time envelope.
///
/// The far-field level sets `{C e^{−δ|Δw|} > s}` have measure `4π ln(C/s)/δ`, and the
/// near region `|Δw| ≤ 1` has measure at most `4π`.
pub fn rearrangement_upper(kernel: KernelId, t: f64, certs: &[BoundCertificate]) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("measure must be positive, got {t}")));
    }
    let near = find_cert(kernel, Regime::Near, certs)?;
    let far = find_cert(kernel, Regime::Far, certs)?;
    let delta = far.decay_rate;
    let c_far = far.fitted_constant.max(0.0);
    let short = |t: f64| -> f64 {
        if kernel.uses_ta() {
            let d3 = near.correction_exponent;
            let a3 = near.fitted_constant.max(0.0);
            1.0 / (PI * t).sqrt() + a3 * (4.0 * PI).powf(d3) * t.powf(-d3) / (1.0 - d3) + c_far * (-delta).exp()
        } else {
            let a2 = near.fitted_constant.max(c_far * (-delta).exp());
            1.0 / (4.0 * PI * t).sqrt() + a2
        }
    };
    if t <= 1.0 {
        Ok(short(t))
    } else {
        let k = delta.exp() * short(1.0).max(c_far);
        Ok(k * (-delta * t / (4.0 * PI)).exp())
    }
}
