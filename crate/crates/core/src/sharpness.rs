//! Numerical drivers for the sharp constants: the Moser threshold `4π`, the closed
//! form of `μ_p(λ)` with its extremal, the limit `p μ_p(λ) → 8πe`, and the mode-wise
//! positivity `a² + 2a(n²/√(n²+ε) − n) + λ − λ' > 0`.

use std::f64::consts::{E, PI};
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cylinder::{self, CylinderGrid, SampledField, TmValue};
use crate::error::{Error, Result};
use crate::quad::{self, QuadTol};
use crate::specfun;

/// `E(δ, λ)` with `δ = e^{ln_delta}`; usable where `δ` itself underflows.
pub fn moser_energy_log(ln_delta: f64, lambda: f64) -> f64 {
    let d2 = (2.0 * ln_delta).exp();
    -2.0 * PI * ln_delta + lambda * PI * (0.5 - 0.5 * d2 + d2 * ln_delta)
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

/// `∫ |∇u_δ|² + λ ∫ u_δ² = −2π ln δ + λπ(1/2 − δ²/2 + δ² ln δ)`.
pub fn moser_energy_closed(delta: f64, lambda: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok(moser_energy_log(delta.ln(), lambda))
}

/// The same energy by nested adaptive quadrature over the unit disk in chart coordinates.
pub fn moser_energy_quadrature(delta: f64, lambda: f64) -> Result<f64> {
    check_delta(delta)?;
    let ld = delta.ln();
    let density = |r2: f64| -> f64 {
        if r2 < delta * delta {
            lambda * ld * ld
        } else {
            let u = -0.5 * r2.ln();
            1.0 / r2 + lambda * u * u
        }
    };
    let inner_tol = QuadTol::new(0.0, 1e-12, 400_000);
    let mut failure = None;
    let mut outer_pts = vec![0.0, 0.5 * delta, delta, 1.0];
    let mut s = 4.0 * delta;
    while s < 1.0 {
        outer_pts.push(s);
        s *= 4.0;
    }
    outer_pts.sort_by(f64::total_cmp);
    let outer = quad::gauss_kronrod_points(
        |w| {
            let top = (1.0 - w * w).max(0.0).sqrt();
            let mut pts = vec![0.0, top];
            if w < delta {
                pts.push((delta * delta - w * w).sqrt());
            }
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            match quad::gauss_kronrod_points(|th| density(w * w + th * th), &pts, &inner_tol) {
                Ok(r) => r.value,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        &outer_pts,
        &QuadTol::new(0.0, 1e-10, 400_000),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(4.0 * outer.value)
}

/// The truncated logarithm `u_δ` centred at `(center_w, 0)`: `−ln δ` inside radius `δ`,
/// `−ln r` out to radius 1, zero beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoserBump {
    pub delta: f64,
    pub center_w: f64,
    /// The `λ` of the energy used for normalization.
    pub lambda_norm: f64,
}

impl MoserBump {
    pub fn new(delta: f64, center_w: f64, lambda_norm: f64) -> Result<Self> {
        check_delta(delta)?;
        if !(center_w == 0.0 || center_w > 1.0) || !center_w.is_finite() {
            return Err(Error::Parameter(format!(
                "center_w must be 0 or exceed the bump radius 1, got {center_w}"
            )));
        }
        if !(lambda_norm >= 0.0) {
            return Err(Error::Parameter(format!("lambda_norm must be nonnegative, got {lambda_norm}")));
        }
        Ok(Self {
            delta,
            center_w,
            lambda_norm,
        })
    }

    pub fn value(&self, w: f64, theta: f64) -> f64 {
        let r2 = (w - self.center_w).powi(2) + theta * theta;
        if r2 < self.delta * self.delta {
            -self.delta.ln()
        } else if r2 <= 1.0 {
            -0.5 * r2.ln()
        } else {
            0.0
        }
    }

    pub fn energy(&self) -> f64 {
        moser_energy_log(self.delta.ln(), self.lambda_norm)
    }

    /// `u_δ / √E(δ)`, of unit energy.
    pub fn normalized_value(&self, w: f64, theta: f64) -> f64 {
        self.value(w, theta) / self.energy().sqrt()
    }

    /// Samples the normalized bump on a grid.
    pub fn sample(&self, grid: CylinderGrid) -> SampledField {
        SampledField::from_fn(grid, |w, th| Complex64::new(self.normalized_value(w, th), 0.0))
    }
}

/// `ln(C/(πδ²) + 1) · E(δ, λ) / ln²δ` evaluated from `ln δ`.
pub fn sharpness_threshold_log(ln_delta: f64, lambda: f64, cap: f64) -> Result<f64> {
    if !(ln_delta < 0.0) {
        return Err(Error::Parameter(format!("need ln delta < 0, got {ln_delta}")));
    }
    if !(cap > 0.0) {
        return Err(Error::Parameter(format!("cap must be positive, got {cap}")));
    }
    // ln(C/(πδ²) + 1) = ln(C/π) − 2 ln δ + ln(1 + πδ²/C)
    let log_term = (cap / PI).ln() - 2.0 * ln_delta + (PI * (2.0 * ln_delta).exp() / cap).ln_1p();
    Ok(log_term * moser_energy_log(ln_delta, lambda) / (ln_delta * ln_delta))
}

/// Upper bound on admissible `β` from the normalized bump at scale `δ`; tends to `4π` as `δ → 0`.
pub fn sharpness_threshold(delta: f64, lambda: f64, cap: f64) -> Result<f64> {
    check_delta(delta)?;
    sharpness_threshold_log(delta.ln(), lambda, cap)
}

/// `∫ (e^{β ũ_δ²} − 1)` for the normalized bump, reduced to one radial integral:
/// `πδ²(e^{β ln²δ/E} − 1) + 2π ∫₀^{ln(1/δ)} (e^{βs²/E} − 1) e^{−2s} ds`.
pub fn tm_bump_radial(beta: f64, lambda: f64, delta: f64) -> Result<TmValue> {
    check_delta(delta)?;
    if !(beta > 0.0) {
        return Err(Error::Parameter(format!("beta must be positive, got {beta}")));
    }
    if !(lambda >= 0.0) {
        return Err(Error::Parameter(format!("lambda must be nonnegative, got {lambda}")));
    }
    let l = -delta.ln();
    let k = beta / moser_energy_log(-l, lambda);
    let core_exp = k * l * l - 2.0 * l;
    let core = PI * (core_exp.exp() - delta * delta);
    let integrand = |s: f64| {
        let x = k * s * s;
        if x < 700.0 {
            x.exp_m1() * (-2.0 * s).exp()
        } else {
            (x - 2.0 * s).exp()
        }
    };
    // the exponent k s² − 2s turns around at s = 1/k
    let mut pts = vec![0.0, l];
    for s in [0.25 / k, 1.0 / k, 1.0, 4.0] {
        if s < l {
            pts.push(s);
        }
    }
    pts.sort_by(f64::total_cmp);
    let ring = quad::gauss_kronrod_points(integrand, &pts, &QuadTol::new(0.0, 1e-12, 400_000));
    let ring = match ring {
        Ok(r) => r.value,
        Err(_) if core_exp > 700.0 => f64::INFINITY,
        Err(e) => return Err(e),
    };
    Ok(TmValue::from_value(core + 2.0 * PI * ring))
}

/// `tm_bump_radial` along a list of scales; overflow entries are `+∞` and flagged.
pub fn tm_blowup_scan(beta: f64, lambda: f64, deltas: &[f64]) -> Result<Vec<TmValue>> {
    deltas.iter().map(|&d| tm_bump_radial(beta, lambda, d)).collect()
}

/// Parameters of the magnetic Hardy–Sobolev inequality
/// `∫|∇_A u|² + λ∫|u|²/|x|² ≥ μ_p(λ) (∫|u|^p/|x|²)^{2/p}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardySobolevParams {
    pub p: f64,
    pub a: f64,
    pub lambda: f64,
}

impl HardySobolevParams {
    pub fn new(p: f64, a: f64, lambda: f64) -> Result<Self> {
        if !(p > 2.0) || !p.is_finite() {
            return Err(Error::Parameter(format!("p must exceed 2, got {p}")));
        }
        if !(0.0..=0.5).contains(&a) {
            return Err(Error::Parameter(format!("flux a = {a} outside [0, 1/2]")));
        }
        if !(lambda + a * a > 0.0) {
            return Err(Error::Parameter(format!("need lambda + a^2 > 0 (a = {a}, lambda = {lambda})")));
        }
        Ok(Self { p, a, lambda })
    }

    /// `α = ((p−2)/2) √(λ + a²)`.
    pub fn alpha(&self) -> f64 {
        0.5 * (self.p - 2.0) * (self.lambda + self.a * self.a).sqrt()
    }

    /// `λ⋆` solving `(λ⋆ + a²)(p² − 4) = 4(1 − 4a²)`.
    pub fn lambda_star(&self) -> f64 {
        4.0 * (1.0 - 4.0 * self.a * self.a) / (self.p * self.p - 4.0) - self.a * self.a
    }

    pub fn in_closed_form_regime(&self) -> bool {
        self.lambda <= self.lambda_star()
    }

    /// Radial extremal `(|x|^α + |x|^{−α})^{−2/(p−2)} = (2 cosh αw)^{−2/(p−2)}` and its `w`-derivative.
    pub fn extremal(&self, w: f64) -> (f64, f64) {
        let k = 2.0 / (self.p - 2.0);
        let al = self.alpha();
        let x = (al * w).abs();
        // ln(2 cosh x) = x + ln(1 + e^{−2x})
        let u = (-k * (x + (-2.0 * x).exp().ln_1p())).exp();
        (u, -k * al * (al * w).tanh() * u)
    }
}

/// `μ_p(λ) = (p/2)(2π)^{1−2/p}(λ+a²)^{1/2+1/p}(2√π Γ(p/(p−2)) / ((p−2)Γ(p/(p−2)+1/2)))^{1−2/p}`.
pub fn mu_p_closed(hp: &HardySobolevParams) -> Result<f64> {
    if !(hp.a > 0.0 && hp.a < 0.5) {
        return Err(Error::Regime(format!("closed form needs 0 < a < 1/2, got {}", hp.a)));
    }
    if !hp.in_closed_form_regime() {
        return Err(Error::Regime(format!(
            "lambda = {} exceeds lambda_star = {}",
            hp.lambda,
            hp.lambda_star()
        )));
    }
    let p = hp.p;
    let q = p / (p - 2.0);
    let c = hp.lambda + hp.a * hp.a;
    let ln_beta = (2.0 * PI.sqrt()).ln() + specfun::ln_gamma(q) - (p - 2.0).ln() - specfun::ln_gamma(q + 0.5);
    let e = 1.0 - 2.0 / p;
    Ok(0.5 * p * (e * (2.0 * PI).ln() + (0.5 + 1.0 / p) * c.ln() + e * ln_beta).exp())
}

/// Quotient of a θ-independent profile, `2π∫(u'² + (λ+a²)u²) / (2π∫|u|^p)^{2/p}`,
/// integrated over `[−w_max, w_max]`.
pub fn radial_quotient<F: FnMut(f64) -> (f64, f64)>(mut profile: F, hp: &HardySobolevParams, w_max: f64) -> Result<f64> {
    if !(w_max > 0.0) {
        return Err(Error::Parameter(format!("w_max must be positive, got {w_max}")));
    }
    let c = hp.lambda + hp.a * hp.a;
    let mut pts = vec![-w_max, 0.0, w_max];
    let mut s = 0.25;
    while s < w_max {
        pts.push(s);
        pts.push(-s);
        s *= 2.0;
    }
    pts.sort_by(f64::total_cmp);
    let tol = QuadTol::new(0.0, 1e-13, 1_000_000);
    let energy = quad::gauss_kronrod_points(
        |w| {
            let (u, du) = profile(w);
            du * du + c * u * u
        },
        &pts,
        &tol,
    )?
    .value;
    let mass = quad::gauss_kronrod_points(|w| profile(w).0.abs().powf(hp.p), &pts, &tol)?.value;
    if mass == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(2.0 * PI * energy / (2.0 * PI * mass).powf(2.0 / hp.p))
}

/// Quotient of the extremal; equals `mu_p_closed` in the closed-form regime.
pub fn extremal_quotient(hp: &HardySobolevParams) -> Result<f64> {
    let k = 2.0 / (hp.p - 2.0);
    // u decays like e^{−kα|w|}; beyond this the tail is below 1e−300 relative
    let w_max = 700.0 / (k * hp.alpha());
    radial_quotient(|w| hp.extremal(w), hp, w_max)
}

/// `magnetic_energy(a, λ) / (∫|u|^p dw dθ)^{2/p}` for a sampled field.
pub fn hardy_sobolev_quotient(field: &SampledField, hp: &HardySobolevParams) -> Result<f64> {
    let p = hp.p;
    let g = field.grid();
    let mut mass = 0.0;
    for i in 0..g.n_w {
        let row: f64 = field.row(i).iter().map(|v| v.norm().powf(p)).sum();
        mass += field.weight(i) * row;
    }
    if mass == 0.0 {
        return Err(Error::ZeroField);
    }
    let e = cylinder::magnetic_energy_any_flux(field, hp.a, hp.lambda)?;
    Ok(e / mass.powf(2.0 / p))
}

/// `p` times the upper bound for `μ_p(λ)` obtained from the bump at `δ = e^{−p/4}`:
/// `16e π^{−2/p} E(δ, λ+a²)/p`. Tends to `8πe`.
pub fn asymptotic_8pie(p: f64, lambda: f64, a: f64) -> Result<f64> {
    if !(p > 2.0) || !p.is_finite() {
        return Err(Error::Parameter(format!("p must exceed 2, got {p}")));
    }
    let c = lambda + a * a;
    if !(c > 0.0) {
        return Err(Error::Parameter(format!("need lambda + a^2 > 0, got {c}")));
    }
    let energy = moser_energy_log(-0.25 * p, c);
    Ok(16.0 * E * PI.powf(-2.0 / p) * energy / p)
}

pub const EIGHT_PI_E: f64 = 8.0 * PI * E;

/// Parameters of the mode-wise domination: flux `a`, shift `λ`, regularization `ε` and
/// the reduced shift `λ'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleShift {
    pub a: f64,
    pub lambda: f64,
    pub eps: f64,
    pub lambda_prime: f64,
}

impl AdmissibleShift {
    pub fn new(a: f64, lambda: f64, eps: f64, lambda_prime: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&a) {
            return Err(Error::Parameter(format!("flux a = {a} outside [0, 1/2]")));
        }
        let c = lambda + a * a;
        if !(c > 0.0) {
            return Err(Error::Parameter(format!("need lambda + a^2 > 0, got {c}")));
        }
        if !(eps > 0.0) || (a > 0.0 && !(eps < c / a)) {
            return Err(Error::Parameter(format!("eps = {eps} outside (0, (lambda + a^2)/a)")));
        }
        let s = Self {
            a,
            lambda,
            eps,
            lambda_prime,
        };
        if !(lambda_prime > 0.0 && lambda_prime < s.lambda_prime_max()) {
            return Err(Error::Parameter(format!(
                "lambda' = {lambda_prime} outside (0, {})",
                s.lambda_prime_max()
            )));
        }
        Ok(s)
    }

    /// `λ + a² − aε`.
    pub fn lambda_prime_max(&self) -> f64 {
        self.lambda + self.a * self.a - self.a * self.eps
    }

    /// `g(n) = a² + 2a(n²/√(n²+ε) − n) + λ − λ'`.
    pub fn gap(&self, n: i64) -> f64 {
        let nf = n as f64;
        // n²/√(n²+ε) − n = −nε/(√(n²+ε)(n + √(n²+ε))) for n ≥ 0
        let s = (nf * nf + self.eps).sqrt();
        let d = if n >= 0 {
            -nf * self.eps / (s * (nf + s))
        } else {
            nf * nf / s - nf
        };
        self.a * self.a + 2.0 * self.a * d + self.lambda - self.lambda_prime
    }
}

pub const MODE_SCAN_CUTOFF: i64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeDomination {
    /// `min(scan_min, tail_bound)`.
    pub min_gap: f64,
    pub scan_min: f64,
    pub argmin: i64,
    /// Lower bound `a² + λ − λ' − aε/N` for all `|n| > N`.
    pub tail_bound: f64,
}

/// Certified minimum of `g(n)` over `ℤ`: exact scan for `|n| ≤ N`, analytic tail beyond.
pub fn mode_domination(shift: &AdmissibleShift) -> ModeDomination {
    mode_domination_with_cutoff(shift, MODE_SCAN_CUTOFF)
}

pub fn mode_domination_with_cutoff(shift: &AdmissibleShift, cutoff: i64) -> ModeDomination {
    let cutoff = cutoff.max(1);
    let mut scan_min = f64::INFINITY;
    let mut argmin = 0;
    for n in -cutoff..=cutoff {
        let g = shift.gap(n);
        if g < scan_min {
            scan_min = g;
            argmin = n;
        }
    }
    // n²/√(n²+ε) − n ≥ −ε/(2n) for n > 0; negative n only add 2a|n|
    let tail_bound = shift.a * shift.a + shift.lambda - shift.lambda_prime - shift.a * shift.eps / cutoff as f64;
    ModeDomination {
        min_gap: scan_min.min(tail_bound),
        scan_min,
        argmin,
        tail_bound,
    }
}

/// One row of a driver table: a scanned parameter, the computed value, the target
/// constant and the signed relative gap `(value − target)/target`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriverRow {
    pub driver: String,
    pub parameter: String,
    pub parameter_value: f64,
    pub lambda: f64,
    pub a: f64,
    pub value: f64,
    pub target: f64,
    pub gap: f64,
}

impl DriverRow {
    fn new(driver: &str, parameter: &str, parameter_value: f64, lambda: f64, a: f64, value: f64, target: f64) -> Self {
        Self {
            driver: driver.to_string(),
            parameter: parameter.to_string(),
            parameter_value,
            lambda,
            a,
            value,
            target,
            gap: (value - target) / target,
        }
    }
}

pub fn threshold_rows(deltas: &[f64], lambda: f64, cap: f64) -> Result<Vec<DriverRow>> {
    deltas
        .iter()
        .map(|&d| {
            let v = sharpness_threshold(d, lambda, cap)?;
            Ok(DriverRow::new("threshold", "delta", d, lambda, 0.0, v, 4.0 * PI))
        })
        .collect()
}

pub fn eight_pi_e_rows(ps: &[f64], lambda: f64, a: f64) -> Result<Vec<DriverRow>> {
    ps.iter()
        .map(|&p| {
            let v = asymptotic_8pie(p, lambda, a)?;
            Ok(DriverRow::new("eight_pi_e", "p", p, lambda, a, v, EIGHT_PI_E))
        })
        .collect()
}

pub fn mu_p_row(hp: &HardySobolevParams) -> Result<DriverRow> {
    let closed = mu_p_closed(hp)?;
    let quotient = extremal_quotient(hp)?;
    Ok(DriverRow::new("mu_p", "p", hp.p, hp.lambda, hp.a, quotient, closed))
}

pub fn write_driver_rows<W: Write>(rows: &[DriverRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
