use std::f64::consts::PI;

use abmoser::heatkernels::{self, TaParams};
use clap::Args;
use serde::Serialize;

use crate::config::{self, CommonArgs, RunConfig};
use crate::output;
use crate::Failure;

#[derive(Debug, Args)]
pub struct HeatArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Times at which the kernels are compared.
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.1,1,10")]
    pub t_list: Vec<f64>,
    /// Number of equispaced angles in [-pi, pi).
    #[arg(long, default_value_t = 64)]
    pub angles: usize,
    /// Largest admissible |spectral - poisson|.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Serialize)]
struct HeatRow {
    t: f64,
    dtheta: f64,
    spectral: f64,
    poisson: f64,
    abs_diff: f64,
    ta_diff: f64,
    envelope: f64,
    ok: bool,
}

pub fn run(args: &HeatArgs) -> Result<(), Failure> {
    config::require_nonempty("t-list", &args.t_list)?;
    if let Some(t) = args.t_list.iter().find(|t| **t <= 0.0) {
        return Err(Failure::Usage(format!("times must be positive, got {t}")));
    }
    if args.angles == 0 {
        return Err(Failure::Usage("--angles must be positive".into()));
    }
    let c = &args.common;
    let eps = match c.eps {
        Some(e) => e,
        None => config::usage(heatkernels::default_eps(c.a, c.lambda))?,
    };
    let p = config::usage(TaParams::new(c.a, eps))?;
    let n = args.angles;
    let angle = |j: f64| -PI + 2.0 * PI * j / n as f64;

    // fit on the angles halfway between the table's
    let training: Vec<(f64, f64)> = args
        .t_list
        .iter()
        .flat_map(|&t| (0..n).map(move |j| (t, angle(j as f64 + 0.5))))
        .collect();
    let constant = heatkernels::fit_comparison_constant(&p, &training)?;

    let mut rows = Vec::with_capacity(args.t_list.len() * n);
    let mut failures = Vec::new();
    for &t in &args.t_list {
        for j in 0..n {
            let th = angle(j as f64);
            let spectral = heatkernels::heat_s1_spectral(t, th)?;
            let poisson = heatkernels::heat_s1_poisson(t, th)?;
            let cmp = heatkernels::ta_comparison(t, th, &p)?;
            let abs_diff = (spectral - poisson).abs();
            let envelope = constant * cmp.envelope;
            let ok = abs_diff <= args.tol && cmp.diff <= envelope;
            if !ok {
                failures.push(format!(
                    "row {}: t={t} dtheta={th}: |spectral-poisson|={abs_diff:e} (tol {:e}), ta_diff={:e} vs envelope {envelope:e}",
                    rows.len(),
                    args.tol,
                    cmp.diff
                ));
            }
            rows.push(HeatRow {
                t,
                dtheta: th,
                spectral,
                poisson,
                abs_diff,
                ta_diff: cmp.diff,
                envelope,
                ok,
            });
        }
    }
    let cfg = RunConfig::new("heat-check", c)
        .with("eps_used", eps)
        .with("t_list", config::join(&args.t_list))
        .with("angles", n)
        .with("tol", args.tol)
        .with("comparison_constant", constant);
    output::write_table(&cfg, c.out.as_deref(), &rows)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Contract(format!(
            "{} of {} rows failed:\n{}",
            failures.len(),
            rows.len(),
            failures.join("\n")
        )))
    }
}
