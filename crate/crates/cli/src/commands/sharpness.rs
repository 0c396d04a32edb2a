use std::f64::consts::PI;

use abmoser::cylinder::{CylinderGrid, SampledField};
use abmoser::sharpness::{self as sh, DriverRow, HardySobolevParams};
use clap::Args;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{self, CommonArgs, RunConfig};
use crate::output;
use crate::Failure;

const FOUR_PI: f64 = 4.0 * PI;

#[derive(Debug, Args)]
pub struct SharpnessArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Bump scales for the threshold scan.
    #[arg(long, value_delimiter = ',', default_value = "1e-3,1e-6,1e-9,1e-12")]
    pub delta_list: Vec<f64>,
    /// Exponents for the 8πe scan.
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
    pub p_list: Vec<f64>,
    /// The constant C of the threshold bound.
    #[arg(long, default_value_t = 1.0)]
    pub cap: f64,
    /// If given, also scan the exponential integral of the normalized bumps at this beta.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Exponent p of the equality check.
    #[arg(long, default_value_t = 3.0)]
    pub mu_p: f64,
    /// Shift lambda of the equality check (must not exceed lambda_star).
    #[arg(long, default_value_t = 0.4)]
    pub mu_lambda: f64,
    /// Number of random fields tested against mu_p.
    #[arg(long, default_value_t = 20)]
    pub fields: usize,
    /// Relative tolerance of the equality check.
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    /// Largest admissible relative gap at the last scale of each scan.
    #[arg(long, default_value_t = 0.02)]
    pub gap_tol: f64,
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

/// Relative gaps strictly shrink in magnitude along the scan.
fn approaches(rows: &[DriverRow]) -> bool {
    rows.windows(2).all(|w| w[1].gap.abs() < w[0].gap.abs())
}

fn monotone(rows: &[DriverRow]) -> bool {
    rows.windows(2).all(|w| w[1].value > w[0].value) || rows.windows(2).all(|w| w[1].value < w[0].value)
}

pub fn run(args: &SharpnessArgs) -> Result<(), Failure> {
    config::require_nonempty("delta-list", &args.delta_list)?;
    config::require_nonempty("p-list", &args.p_list)?;
    let c = &args.common;
    if let Some(d) = args.delta_list.iter().find(|d| !(**d > 0.0 && **d < 1.0)) {
        return Err(Failure::Usage(format!("deltas must lie in (0, 1), got {d}")));
    }
    if let Some(p) = args.p_list.iter().find(|p| **p <= 2.0) {
        return Err(Failure::Usage(format!("exponents must exceed 2, got {p}")));
    }
    let hp = config::usage(HardySobolevParams::new(args.mu_p, c.a, args.mu_lambda))?;
    let mu = config::usage(sh::mu_p_closed(&hp))?;

    let mut deltas = args.delta_list.clone();
    deltas.sort_by(|a, b| b.total_cmp(a));
    let mut ps = args.p_list.clone();
    ps.sort_by(f64::total_cmp);

    let mut violations = Vec::new();

    let threshold = config::usage(sh::threshold_rows(&deltas, c.lambda, args.cap))?;
    if !approaches(&threshold) {
        violations.push("threshold: gap to 4π does not shrink along the delta scan".to_string());
    }
    let last = threshold.last().expect("nonempty scan");
    if last.gap.abs() > args.gap_tol {
        violations.push(format!(
            "threshold: final gap {:.3e} at delta={} exceeds {}",
            last.gap, last.parameter_value, args.gap_tol
        ));
    }

    let eight = config::usage(sh::eight_pi_e_rows(&ps, c.lambda, c.a))?;
    if !monotone(&eight) || !approaches(&eight) {
        violations.push("eight_pi_e: sequence is not monotone toward 8πe".to_string());
    }
    let last = eight.last().expect("nonempty scan");
    if last.gap.abs() > args.gap_tol {
        violations.push(format!(
            "eight_pi_e: final gap {:.3e} at p={} exceeds {}",
            last.gap, last.parameter_value, args.gap_tol
        ));
    }

    let mut rows = threshold;
    rows.extend(eight);

    let eq = sh::mu_p_row(&hp)?;
    if eq.gap.abs() > args.tol {
        violations.push(format!("mu_p: extremal quotient off by {:.3e} (tol {})", eq.gap, args.tol));
    }
    rows.push(eq);

    if args.fields > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
        let grid = CylinderGrid::new(-16.0, 16.0, 641, 32, false)?;
        let mut worst = f64::INFINITY;
        for _ in 0..args.fields {
            worst = worst.min(sh::hardy_sobolev_quotient(&random_field(&mut rng, grid), &hp)?);
        }
        if worst < mu - 1e-6 {
            violations.push(format!("mu_p: random field quotient {worst} below {mu}"));
        }
        rows.push(DriverRow {
            driver: "mu_p_random".into(),
            parameter: "fields".into(),
            parameter_value: args.fields as f64,
            lambda: hp.lambda,
            a: hp.a,
            value: worst,
            target: mu,
            gap: (worst - mu) / mu,
        });
    }

    if let Some(beta) = args.beta {
        if beta.is_nan() || beta <= 0.0 {
            return Err(Failure::Usage(format!("beta must be positive, got {beta}")));
        }
        let lam = c.lambda.max(0.0);
        let scan = sh::tm_blowup_scan(beta, lam, &deltas)?;
        let increasing = scan.windows(2).all(|w| w[1].value > w[0].value);
        if beta > FOUR_PI && !increasing {
            violations.push(format!("tm_blowup: values do not increase at beta={beta}"));
        }
        if beta <= FOUR_PI && scan.iter().any(|v| v.overflowed) {
            violations.push(format!("tm_blowup: overflow at subcritical beta={beta}"));
        }
        let first = scan[0].value;
        for (d, v) in deltas.iter().zip(&scan) {
            rows.push(DriverRow {
                driver: "tm_blowup".into(),
                parameter: "delta".into(),
                parameter_value: *d,
                lambda: lam,
                a: 0.0,
                value: v.value,
                target: first,
                gap: (v.value - first) / first,
            });
        }
    }

    let mut cfg = RunConfig::new("sharpness", c)
        .with("delta_list", config::join(&deltas))
        .with("p_list", config::join(&ps))
        .with("cap", args.cap)
        .with("mu_p", args.mu_p)
        .with("mu_lambda", args.mu_lambda)
        .with("fields", args.fields)
        .with("tol", args.tol)
        .with("gap_tol", args.gap_tol);
    if let Some(b) = args.beta {
        cfg = cfg.with("beta", b);
    }
    output::write_table(&cfg, c.out.as_deref(), &rows)?;
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::Contract(violations.join("\n")))
    }
}
