//! Distribution functions and non-increasing rearrangements of weighted samples.
//!
//! A sample set `(v_i, μ_i)` stands for a step function taking the value `v_i` on a
//! set of measure `μ_i`. Its rearrangement `f*` is again a step function, obtained by
//! sorting values in decreasing order and laying the weights end to end, so the
//! layer-cake and equimeasurability identities hold exactly up to rounding.

use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredSamples {
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl MeasuredSamples {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::Shape(format!(
                "{} values but {} weights",
                values.len(),
                weights.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Domain(format!("sample values must be finite and >= 0, got {v}")));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::Domain(format!("weights must be finite and > 0, got {w}")));
        }
        Ok(Self { values, weights })
    }

    /// Samples of `|f|` from signed or complex magnitudes.
    pub fn from_abs<I: IntoIterator<Item = f64>>(values: I, weights: Vec<f64>) -> Result<Self> {
        Self::new(values.into_iter().map(f64::abs).collect(), weights)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total_measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `∫|f| dμ`.
    pub fn integral(&self) -> f64 {
        self.values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }
}

/// `m(f, s) = μ{|f| > s}`.
pub fn distribution(samples: &MeasuredSamples, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("level must be >= 0, got {s}")));
    }
    Ok(samples
        .values
        .iter()
        .zip(&samples.weights)
        .filter(|(v, _)| **v > s)
        .map(|(_, w)| w)
        .sum())
}

/// `∫_c^∞ m(f, s) ds = Σ μ_i (v_i − c)⁺`.
pub fn distribution_integral_above(samples: &MeasuredSamples, c: f64) -> f64 {
    samples
        .values
        .iter()
        .zip(&samples.weights)
        .map(|(v, w)| w * (v - c).max(0.0))
        .sum()
}

/// Right-continuous non-increasing step function on `[0, ∞)`, zero past its support.
#[derive(Debug, Clone, PartialEq)]
pub struct DecreasingProfile {
    /// `breaks[0] = 0`; step `k` occupies `[breaks[k], breaks[k+1])`.
    breaks: Vec<f64>,
    values: Vec<f64>,
    /// `cumulative[k] = ∫₀^{breaks[k]} f*`.
    cumulative: Vec<f64>,
}

impl DecreasingProfile {
    /// Rearranges steps of the given heights and widths.
    pub fn from_steps(values: &[f64], widths: &[f64]) -> Result<Self> {
        let s = MeasuredSamples::new(values.to_vec(), widths.to_vec())?;
        rearrange(&s)
    }

    fn from_sorted(pairs: Vec<(f64, f64)>) -> Self {
        let mut breaks = vec![0.0];
        let mut values: Vec<f64> = Vec::new();
        let mut cumulative = vec![0.0];
        for (v, w) in pairs {
            if v == 0.0 {
                break;
            }
            if values.last() == Some(&v) {
                let k = values.len();
                breaks[k] += w;
                cumulative[k] += v * w;
                continue;
            }
            let t0 = *breaks.last().unwrap();
            let c0 = *cumulative.last().unwrap();
            values.push(v);
            breaks.push(t0 + w);
            cumulative.push(c0 + v * w);
        }
        Self {
            breaks,
            values,
            cumulative,
        }
    }

    /// Measure of the support of `f*`.
    pub fn support_measure(&self) -> f64 {
        *self.breaks.last().unwrap()
    }

    pub fn steps(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &v)| (self.breaks[k], self.breaks[k + 1], v))
    }

    fn step_index(&self, t: f64) -> Option<usize> {
        if t >= self.support_measure() {
            return None;
        }
        // last k with breaks[k] <= t
        Some(self.breaks.partition_point(|&b| b <= t) - 1)
    }

    /// `f*(t)`.
    pub fn star(&self, t: f64) -> f64 {
        match self.step_index(t.max(0.0)) {
            Some(k) => self.values[k],
            None => 0.0,
        }
    }

    /// `∫₀^t f*`.
    pub fn integral_to(&self, t: f64) -> f64 {
        match self.step_index(t.max(0.0)) {
            Some(k) => self.cumulative[k] + self.values[k] * (t - self.breaks[k]),
            None => *self.cumulative.last().unwrap(),
        }
    }

    /// `f**(t) = (1/t)∫₀^t f*`; `f**(0) = f*(0)`.
    pub fn star_star(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.star(0.0);
        }
        self.integral_to(t) / t
    }

    /// `|{f* > s}|`.
    pub fn distribution(&self, s: f64) -> f64 {
        // values are decreasing: count steps with value > s
        let k = self.values.partition_point(|&v| v > s);
        self.breaks[k]
    }

    /// `∫_t^∞ f*(s) g*(s) ds`.
    pub fn tail_product(&self, g: &DecreasingProfile, t: f64) -> f64 {
        let end = self.support_measure().min(g.support_measure());
        let mut s = t.max(0.0);
        let mut total = 0.0;
        while s < end {
            let (Some(i), Some(j)) = (self.step_index(s), g.step_index(s)) else {
                break;
            };
            let next = self.breaks[i + 1].min(g.breaks[j + 1]);
            total += self.values[i] * g.values[j] * (next - s);
            s = next;
        }
        total
    }

    /// Writes `t, f_star, f_star_star` rows at the requested measures.
    pub fn write_csv<W: Write>(&self, out: W, ts: &[f64]) -> Result<()> {
        #[derive(Serialize)]
        struct Row {
            t: f64,
            f_star: f64,
            f_star_star: f64,
        }
        let mut w = csv::Writer::from_writer(out);
        for &t in ts {
            w.serialize(Row {
                t,
                f_star: self.star(t),
                f_star_star: self.star_star(t),
            })?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn rearrange(samples: &MeasuredSamples) -> Result<DecreasingProfile> {
    let mut pairs: Vec<(f64, f64)> = samples
        .values
        .iter()
        .copied()
        .zip(samples.weights.iter().copied())
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(DecreasingProfile::from_sorted(pairs))
}

/// `t f**(t) g**(t) + ∫_t^∞ f* g*`.
pub fn oneil_bound(f: &DecreasingProfile, g: &DecreasingProfile, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("measure must be positive, got {t}")));
    }
    let tail = f.tail_product(g, t);
    if !tail.is_finite() {
        return Err(Error::Domain("divergent tail integral".into()));
    }
    Ok(t * f.star_star(t) * g.star_star(t) + tail)
}

/// `|t f**(t) − t f*(t) − ∫_{f*(t)}^∞ m(f,s) ds|`.
pub fn duhamel_identity_check(samples: &MeasuredSamples, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("measure must be positive, got {t}")));
    }
    let p = rearrange(samples)?;
    let fs = p.star(t);
    let lhs = t * p.star_star(t);
    let rhs = t * fs + distribution_integral_above(samples, fs);
    Ok((lhs - rhs).abs())
}

/// Circular convolution on ℤ_N, `h(x) = Σ_y f(y) g(x − y)`.
pub fn cyclic_convolution(f: &[f64], g: &[f64]) -> Result<Vec<f64>> {
    if f.len() != g.len() {
        return Err(Error::Shape("convolution operands differ in length".into()));
    }
    let n = f.len();
    Ok((0..n)
        .map(|x| (0..n).map(|y| f[y] * g[(x + n - y) % n]).sum())
        .collect())
}

// ---------------------------------------------------------------------------
// |w|^{−δ} on the strip

/// Samples of `|w|^{−δ}` on `{w_lo < |w| < w_hi} × S¹` over `n` log-spaced cells
/// (per side), each carrying its exact measure `2π Δw`.
pub fn strip_power_samples(delta: f64, w_lo: f64, w_hi: f64, n: usize, two_sided: bool) -> Result<MeasuredSamples> {
    if !(delta > 0.0) || !(0.0 < w_lo && w_lo < w_hi) || n == 0 {
        return Err(Error::Parameter("need delta > 0, 0 < w_lo < w_hi, n >= 1".into()));
    }
    let ratio = (w_hi / w_lo).ln() / n as f64;
    let sides = if two_sided { 2 } else { 1 };
    let mut values = Vec::with_capacity(n * sides);
    let mut weights = Vec::with_capacity(n * sides);
    for k in 0..n {
        let a = w_lo * (ratio * k as f64).exp();
        let b = w_lo * (ratio * (k + 1) as f64).exp();
        let v = (0.5 * (a + b)).powf(-delta);
        for _ in 0..sides {
            values.push(v);
            weights.push(2.0 * PI * (b - a));
        }
    }
    MeasuredSamples::new(values, weights)
}

/// Exact rearrangement of `|w|^{−δ}` on the strip: `(2π/t)^δ` for `w > 0`,
/// `(4π/t)^δ` for `w ∈ ℝ`.
pub fn strip_power_star(delta: f64, t: f64, two_sided: bool) -> f64 {
    let m = if two_sided { 4.0 * PI } else { 2.0 * PI };
    (m / t).powf(delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StripPowerReport {
    pub delta: f64,
    pub cells: usize,
    pub max_rel_error: f64,
    /// Measure of the excluded neighborhood of the singularity.
    pub excluded_measure: f64,
}

/// Compares the rearranged samples against the exact profile at the given measures.
pub fn strip_power_report(delta: f64, cells: usize, ts: &[f64], two_sided: bool) -> Result<StripPowerReport> {
    let (w_lo, w_hi) = (1e-9, 1e3);
    let s = strip_power_samples(delta, w_lo, w_hi, cells, two_sided)?;
    let p = rearrange(&s)?;
    let excluded = if two_sided { 4.0 * PI * w_lo } else { 2.0 * PI * w_lo };
    let mut worst: f64 = 0.0;
    for &t in ts {
        let exact = strip_power_star(delta, t, two_sided);
        worst = worst.max(((p.star(t) - exact) / exact).abs());
    }
    Ok(StripPowerReport {
        delta,
        cells,
        max_rel_error: worst,
        excluded_measure: excluded,
    })
}
