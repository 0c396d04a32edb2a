//! Fields on the cylinder ℝ×S¹ (or the half cylinder (0,∞)×S¹) in the coordinates
//! `w = ln r` (resp. `w = −ln|x|`), `θ ∈ [−π, π)`.
//!
//! Angular modes follow `u(w,θ) = (1/2π) Σ_n u_n(w) e^{inθ}` with
//! `u_n(w) = ∫ u(w,θ) e^{−inθ} dθ`; on an `N`-point grid `n` ranges over
//! `[−N/2, N/2)`. Radial derivatives use fourth-order centered differences with
//! zero extension past the grid ends, angular derivatives are spectral.

use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest magnitude tolerated on nodes that must vanish.
pub const SUPPORT_TOL: f64 = 1e-12;

/// Version tag written into field headers.
pub const CONVENTION_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderPoint {
    pub w: f64,
    pub theta: f64,
}

impl CylinderPoint {
    pub fn new(w: f64, theta: f64) -> Self {
        Self {
            w,
            theta: crate::heatkernels::wrap_angle(theta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderGrid {
    pub w_min: f64,
    pub w_max: f64,
    pub n_w: usize,
    pub n_theta: usize,
    pub half_line: bool,
}

impl CylinderGrid {
    pub fn new(w_min: f64, w_max: f64, n_w: usize, n_theta: usize, half_line: bool) -> Result<Self> {
        let g = Self {
            w_min,
            w_max,
            n_w,
            n_theta,
            half_line,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if !(self.w_min < self.w_max) || !self.w_min.is_finite() || !self.w_max.is_finite() {
            return Err(Error::Parameter(format!("need w_min < w_max, got [{}, {}]", self.w_min, self.w_max)));
        }
        if self.n_w < 2 {
            return Err(Error::Parameter("n_w must be at least 2".into()));
        }
        if self.n_theta < 2 || !self.n_theta.is_multiple_of(2) {
            return Err(Error::Parameter(format!("n_theta must be even and >= 2, got {}", self.n_theta)));
        }
        if self.half_line && self.w_min < 0.0 {
            return Err(Error::Parameter("half-line grid needs w_min >= 0".into()));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        (self.w_max - self.w_min) / (self.n_w - 1) as f64
    }

    pub fn w(&self, i: usize) -> f64 {
        if i + 1 == self.n_w {
            self.w_max
        } else {
            self.w_min + i as f64 * self.h()
        }
    }

    pub fn theta(&self, j: usize) -> f64 {
        -PI + 2.0 * PI * j as f64 / self.n_theta as f64
    }

    /// Trapezoid weight of radial node `i`.
    pub fn w_weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.n_w {
            0.5 * self.h()
        } else {
            self.h()
        }
    }

    pub fn theta_weight(&self) -> f64 {
        2.0 * PI / self.n_theta as f64
    }

    pub fn len(&self) -> usize {
        self.n_w * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Signed mode number stored at FFT slot `k`.
    pub fn mode_of_slot(&self, k: usize) -> i64 {
        let n = self.n_theta as i64;
        let k = k as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }
}

/// Complex samples on a [`CylinderGrid`], row-major in `(i_w, i_theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: CylinderGrid,
    values: Vec<Complex64>,
}

impl SampledField {
    pub fn new(grid: CylinderGrid, values: Vec<Complex64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::Shape(format!("expected {} values, got {}", grid.len(), values.len())));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: FnMut(f64, f64) -> Complex64>(grid: CylinderGrid, mut f: F) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.n_w {
            let w = grid.w(i);
            for j in 0..grid.n_theta {
                values.push(f(w, grid.theta(j)));
            }
        }
        Self { grid, values }
    }

    pub fn zeros(grid: CylinderGrid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> &CylinderGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, i_w: usize, i_theta: usize) -> Complex64 {
        self.values[i_w * self.grid.n_theta + i_theta]
    }

    pub fn row(&self, i_w: usize) -> &[Complex64] {
        let n = self.grid.n_theta;
        &self.values[i_w * n..(i_w + 1) * n]
    }

    /// Quadrature weight of node `(i_w, ·)`; weights sum to `(w_max − w_min)·2π`.
    pub fn weight(&self, i_w: usize) -> f64 {
        self.grid.w_weight(i_w) * self.grid.theta_weight()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Multiplies the field by `e^{ikθ}`.
    pub fn twisted(&self, k: i64) -> Self {
        let g = self.grid;
        let mut values = self.values.clone();
        for i in 0..g.n_w {
            for j in 0..g.n_theta {
                values[i * g.n_theta + j] *= Complex64::from_polar(1.0, k as f64 * g.theta(j));
            }
        }
        Self { grid: g, values }
    }

    /// `∫ |u|² dw dθ`.
    pub fn norm_sq(&self) -> f64 {
        self.weighted_sum(|_, v| v.norm_sqr())
    }

    fn weighted_sum<F: Fn(usize, Complex64) -> f64>(&self, f: F) -> f64 {
        let n = self.grid.n_theta;
        let mut total = 0.0;
        for i in 0..self.grid.n_w {
            let row: f64 = self.values[i * n..(i + 1) * n].iter().map(|&v| f(i, v)).sum();
            total += self.weight(i) * row;
        }
        total
    }

    /// Fails unless every sample on the listed radial rows is below [`SUPPORT_TOL`].
    fn check_rows_vanish(&self, rows: &[usize], what: &str) -> Result<()> {
        for &i in rows {
            let worst = self.row(i).iter().map(|v| v.norm()).fold(0.0, f64::max);
            if worst > SUPPORT_TOL {
                return Err(Error::Support(format!("{what}: |u| = {worst:e} on radial node {i}")));
            }
        }
        Ok(())
    }
}

/// Radial profiles `u_n(w)` for `n ∈ [−N/2, N/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeCoefficients {
    grid: CylinderGrid,
    /// `profiles[k]` holds the mode stored at FFT slot `k`.
    profiles: Vec<Vec<Complex64>>,
}

impl ModeCoefficients {
    pub fn grid(&self) -> &CylinderGrid {
        &self.grid
    }

    pub fn mode(&self, n: i64) -> Option<&[Complex64]> {
        let nt = self.grid.n_theta as i64;
        if n < -nt / 2 || n >= nt / 2 {
            return None;
        }
        Some(&self.profiles[n.rem_euclid(nt) as usize])
    }

    /// `(n, u_n)` pairs in ascending `n`.
    pub fn modes(&self) -> impl Iterator<Item = (i64, &[Complex64])> {
        let nt = self.grid.n_theta as i64;
        (-nt / 2..nt / 2).map(move |n| (n, self.profiles[n.rem_euclid(nt) as usize].as_slice()))
    }

    pub fn reconstruct(&self) -> SampledField {
        let g = self.grid;
        let n = g.n_theta;
        let mut planner = FftPlanner::new();
        let ifft = planner.plan_fft_inverse(n);
        let mut values = Vec::with_capacity(g.len());
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..g.n_w {
            for (k, b) in buf.iter_mut().enumerate() {
                let sign = if g.mode_of_slot(k) % 2 == 0 { 1.0 } else { -1.0 };
                *b = self.profiles[k][i] * (sign / (2.0 * PI));
            }
            ifft.process(&mut buf);
            values.extend_from_slice(&buf);
        }
        SampledField { grid: g, values }
    }
}

#[allow(clippy::needless_range_loop)]
pub fn decompose(field: &SampledField) -> Result<ModeCoefficients> {
    let g = field.grid;
    g.validate()?;
    if field.values.len() != g.len() {
        return Err(Error::Shape("field length does not match its grid".into()));
    }
    let n = g.n_theta;
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let mut profiles = vec![vec![Complex64::new(0.0, 0.0); g.n_w]; n];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let scale = 2.0 * PI / n as f64;
    for i in 0..g.n_w {
        buf.copy_from_slice(field.row(i));
        fft.process(&mut buf);
        for (k, b) in buf.iter().enumerate() {
            let sign = if g.mode_of_slot(k) % 2 == 0 { 1.0 } else { -1.0 };
            profiles[k][i] = b * (sign * scale);
        }
    }
    Ok(ModeCoefficients { grid: g, profiles })
}

/// Fourth-order centered difference with zeros past both ends.
pub fn fd4_derivative(f: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = f.len();
    let at = |i: isize| -> Complex64 {
        if i < 0 || i as usize >= n {
            Complex64::new(0.0, 0.0)
        } else {
            f[i as usize]
        }
    };
    (0..n as isize)
        .map(|i| (at(i - 2) - at(i - 1) * 8.0 + at(i + 1) * 8.0 - at(i + 2)) / (12.0 * h))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MagneticParams {
    pub a: f64,
    pub lambda: f64,
    pub beta: f64,
}

impl MagneticParams {
    pub fn new(a: f64, lambda: f64, beta: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&a) {
            return Err(Error::Parameter(format!("flux a = {a} outside [0, 1/2]")));
        }
        if !(lambda + a * a > 0.0) {
            return Err(Error::Parameter(format!("need lambda + a^2 > 0 (a = {a}, lambda = {lambda})")));
        }
        if !(beta > 0.0) {
            return Err(Error::Parameter(format!("beta must be positive, got {beta}")));
        }
        Ok(Self { a, lambda, beta })
    }

    /// Parameters with the critical exponent β = 4π.
    pub fn critical(a: f64, lambda: f64) -> Result<Self> {
        Self::new(a, lambda, 4.0 * PI)
    }
}

/// `∫ (|∂_w u|² + |(∂_θ − ia)u|² + λ|u|²) dw dθ`.
pub fn magnetic_energy(field: &SampledField, p: &MagneticParams) -> Result<f64> {
    magnetic_energy_any_flux(field, p.a, p.lambda)
}

/// [`magnetic_energy`] for an arbitrary real flux `a` and shift `lambda`.
pub fn magnetic_energy_any_flux(field: &SampledField, a: f64, lambda: f64) -> Result<f64> {
    let g = field.grid;
    field.check_rows_vanish(&[0, g.n_w - 1], "field must vanish at the radial ends")?;
    let nt = g.n_theta;
    let h = g.h();
    // radial derivative, column by column
    let mut dw = vec![Complex64::new(0.0, 0.0); g.len()];
    let mut col = vec![Complex64::new(0.0, 0.0); g.n_w];
    for j in 0..nt {
        for (i, c) in col.iter_mut().enumerate() {
            *c = field.values[i * nt + j];
        }
        for (i, d) in fd4_derivative(&col, h).into_iter().enumerate() {
            dw[i * nt + j] = d;
        }
    }
    // (∂_θ − ia)u, row by row through the FFT
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(nt);
    let ifft = planner.plan_fft_inverse(nt);
    let mut buf = vec![Complex64::new(0.0, 0.0); nt];
    let mut total = 0.0;
    for i in 0..g.n_w {
        buf.copy_from_slice(field.row(i));
        fft.process(&mut buf);
        for (k, b) in buf.iter_mut().enumerate() {
            let n = g.mode_of_slot(k) as f64;
            *b *= Complex64::new(0.0, n - a) / nt as f64;
        }
        ifft.process(&mut buf);
        let mut row = 0.0;
        for j in 0..nt {
            let u = field.values[i * nt + j];
            row += dw[i * nt + j].norm_sqr() + buf[j].norm_sqr() + lambda * u.norm_sqr();
        }
        total += field.weight(i) * row;
    }
    Ok(total)
}

/// `Σ_n ∫ (|u_n'|² + ((n−a)² + λ)|u_n|²) dw / 2π`.
pub fn mode_energy(modes: &ModeCoefficients, a: f64, lambda: f64) -> f64 {
    let g = modes.grid;
    let h = g.h();
    let mut total = 0.0;
    for (n, prof) in modes.modes() {
        let d = fd4_derivative(prof, h);
        let shift = (n as f64 - a).powi(2) + lambda;
        for i in 0..g.n_w {
            total += g.w_weight(i) * (d[i].norm_sqr() + shift * prof[i].norm_sqr());
        }
    }
    total / (2.0 * PI)
}

/// `magnetic_energy(λ = 0) / ∫|u|²`.
pub fn hardy_quotient(field: &SampledField, a: f64) -> Result<f64> {
    let mass = field.norm_sq();
    if mass == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(magnetic_energy_any_flux(field, a, 0.0)? / mass)
}

/// Value of `∫ (e^{β|u|²} − 1)`; overflow is reported rather than raised.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TmValue {
    pub value: f64,
    pub overflowed: bool,
}

impl TmValue {
    pub(crate) fn from_value(v: f64) -> Self {
        if v.is_finite() {
            Self {
                value: v,
                overflowed: false,
            }
        } else {
            Self {
                value: f64::INFINITY,
                overflowed: true,
            }
        }
    }
}

pub fn tm_functional(field: &SampledField, beta: f64) -> Result<TmValue> {
    if !(beta > 0.0) {
        return Err(Error::Parameter(format!("beta must be positive, got {beta}")));
    }
    Ok(TmValue::from_value(field.weighted_sum(|_, v| (beta * v.norm_sqr()).exp_m1())))
}

/// `magnetic_energy − (1/4)∫ |u|²/w² dw dθ` on the half cylinder.
pub fn ball_hardy_energy(field: &SampledField, p: &MagneticParams) -> Result<f64> {
    ball_hardy_energy_any_flux(field, p.a, p.lambda)
}

/// [`ball_hardy_energy`] for an arbitrary real flux `a` and shift `lambda`.
pub fn ball_hardy_energy_any_flux(field: &SampledField, a: f64, lambda: f64) -> Result<f64> {
    let g = field.grid;
    if !g.half_line {
        return Err(Error::Parameter("ball energy needs a half-line grid".into()));
    }
    field.check_rows_vanish(&[0, 1.min(g.n_w - 1)], "field must vanish near w = 0")?;
    let e = magnetic_energy_any_flux(field, a, lambda)?;
    let hardy = field.weighted_sum(|i, v| {
        let w = g.w(i);
        if w > 0.0 {
            v.norm_sqr() / (w * w)
        } else {
            0.0
        }
    });
    Ok(e - 0.25 * hardy)
}

// ---------------------------------------------------------------------------
// I/O

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub convention_version: u32,
    pub grid: CylinderGrid,
    pub mode_convention: String,
}

impl FieldHeader {
    pub fn for_grid(grid: CylinderGrid) -> Self {
        Self {
            convention_version: CONVENTION_VERSION,
            grid,
            mode_convention: "u(w,theta) = (1/2pi) sum_n u_n(w) exp(i n theta), n in [-N/2, N/2)".into(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct FieldRow {
    i_w: usize,
    i_theta: usize,
    re: f64,
    im: f64,
}

/// Writes the samples as CSV (`i_w, i_theta, re, im`) and the grid as a JSON header.
pub fn write_field<C: Write, J: Write>(field: &SampledField, csv_out: C, json_out: J) -> Result<()> {
    serde_json::to_writer_pretty(json_out, &FieldHeader::for_grid(field.grid))?;
    let mut w = csv::Writer::from_writer(csv_out);
    let g = field.grid;
    for i in 0..g.n_w {
        for j in 0..g.n_theta {
            let v = field.value(i, j);
            w.serialize(FieldRow {
                i_w: i,
                i_theta: j,
                re: v.re,
                im: v.im,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_field<C: Read, J: Read>(csv_in: C, json_in: J) -> Result<SampledField> {
    let header: FieldHeader = serde_json::from_reader(json_in)?;
    if header.convention_version != CONVENTION_VERSION {
        return Err(Error::Parameter(format!(
            "unsupported field convention version {}",
            header.convention_version
        )));
    }
    let g = header.grid;
    g.validate()?;
    let mut values = vec![Complex64::new(0.0, 0.0); g.len()];
    let mut seen = vec![false; g.len()];
    let mut r = csv::Reader::from_reader(csv_in);
    for row in r.deserialize() {
        let row: FieldRow = row?;
        if row.i_w >= g.n_w || row.i_theta >= g.n_theta {
            return Err(Error::Shape(format!("node ({}, {}) outside grid", row.i_w, row.i_theta)));
        }
        let k = row.i_w * g.n_theta + row.i_theta;
        if seen[k] {
            return Err(Error::Shape(format!("duplicate node ({}, {})", row.i_w, row.i_theta)));
        }
        seen[k] = true;
        values[k] = Complex64::new(row.re, row.im);
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Shape("missing nodes in field file".into()));
    }
    SampledField::new(g, values)
}
