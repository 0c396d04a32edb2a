use std::fs;
use std::path::{Path, PathBuf};

use abmoser::greens::{self, BoundCertificate, KernelId, KernelParams, KernelPoint, Regime};
use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{self, CommonArgs, RunConfig};
use crate::output;
use crate::Failure;

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Kernels to certify.
    #[arg(long, value_delimiter = ',', default_value = "phi1,phi2,phi4,phi5")]
    pub kernels: Vec<KernelId>,
    /// Exponent of the near-field correction for phi2 and phi5.
    #[arg(long, default_value_t = 0.25)]
    pub delta3: f64,
    /// Random held-out points added to the fixed held-out grid, per kernel and regime.
    #[arg(long, default_value_t = 16)]
    pub extra_held_out: usize,
    /// Directory receiving one JSON certificate per kernel and regime.
    #[arg(long, default_value = "certificates")]
    pub cert_dir: PathBuf,
    /// Re-fit the certificates stored in this directory and compare instead of writing new ones.
    #[arg(long)]
    pub check: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct SummaryRow {
    kernel: KernelId,
    regime: Regime,
    fitted_constant: f64,
    sample_report: f64,
    decay_rate: f64,
    held_out_points: usize,
    held_out_max: f64,
    holds: bool,
    grid_hash: String,
}

fn cert_path(dir: &Path, kernel: KernelId, regime: Regime) -> PathBuf {
    let r = match regime {
        Regime::Near => "near",
        Regime::Far => "far",
    };
    dir.join(format!("{kernel}_{r}.json"))
}

fn random_held_out(rng: &mut ChaCha8Rng, kernel: KernelId, regime: Regime, n: usize, train: &[KernelPoint]) -> Vec<KernelPoint> {
    let mut pts = Vec::with_capacity(n);
    while pts.len() < n {
        let dw: f64 = match regime {
            Regime::Near => 10f64.powf(rng.gen_range(-2.0..0.0)),
            Regime::Far => rng.gen_range(1.0..8.0),
        };
        let th = rng.gen_range(0.0..std::f64::consts::PI);
        let base = match (kernel.half_line(), regime) {
            (false, _) => 0.0,
            (true, Regime::Near) => 2.0,
            (true, Regime::Far) => 1.0,
        };
        let x = KernelPoint {
            w: base + dw,
            wp: base,
            dtheta: th,
        };
        if !train.contains(&x) {
            pts.push(x);
        }
    }
    pts
}

fn to_json(cert: &BoundCertificate) -> Result<String, Failure> {
    serde_json::to_string_pretty(cert)
        .map(|s| s + "\n")
        .map_err(|e| Failure::Contract(e.to_string()))
}

fn check(dir: &Path, args: &CertifyArgs) -> Result<(), Failure> {
    let mut mismatches = Vec::new();
    for &kernel in &args.kernels {
        for regime in [Regime::Near, Regime::Far] {
            let path = cert_path(dir, kernel, regime);
            let text = fs::read_to_string(&path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            let stored: BoundCertificate =
                serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let refit = greens::certify_bounds_on(kernel, regime, &stored.params, stored.training_grid.clone())?;
            if refit != stored {
                mismatches.push(format!(
                    "{}: re-fit differs (fitted {} vs stored {}, hash {} vs {})",
                    path.display(),
                    refit.fitted_constant,
                    stored.fitted_constant,
                    refit.grid_hash,
                    stored.grid_hash
                ));
            }
        }
    }
    if mismatches.is_empty() {
        println!("all certificates reproduce");
        Ok(())
    } else {
        Err(Failure::Contract(mismatches.join("\n")))
    }
}

pub fn run(args: &CertifyArgs) -> Result<(), Failure> {
    if args.kernels.is_empty() {
        return Err(Failure::Usage("--kernels must not be empty".into()));
    }
    if let Some(dir) = &args.check {
        return check(dir, args);
    }
    let c = &args.common;
    let params = config::usage(KernelParams::new(c.lambda, c.a, c.eps).and_then(|p| p.with_delta3(args.delta3)))?;
    fs::create_dir_all(&args.cert_dir)
        .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", args.cert_dir.display())))?;
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &kernel in &args.kernels {
        for regime in [Regime::Near, Regime::Far] {
            let cert = greens::certify_bounds(kernel, regime, &params)
                .map_err(|e| Failure::Contract(format!("{kernel} {regime:?}: fit failed: {e}")))?;
            let (_, mut held) = greens::default_grids(kernel, regime);
            held.extend(random_held_out(&mut rng, kernel, regime, args.extra_held_out, &cert.training_grid));
            let v = greens::verify_certificate(&cert, &held)?;
            if !v.holds {
                failures.push(format!(
                    "{kernel} {regime:?}: held-out ratio {} exceeds fitted {}",
                    v.max_ratio, v.fitted_constant
                ));
            }
            fs::write(cert_path(&args.cert_dir, kernel, regime), to_json(&cert)?)?;
            rows.push(SummaryRow {
                kernel,
                regime,
                fitted_constant: cert.fitted_constant,
                sample_report: cert.sample_report,
                decay_rate: cert.decay_rate,
                held_out_points: v.points,
                held_out_max: v.max_ratio,
                holds: v.holds,
                grid_hash: cert.grid_hash.clone(),
            });
        }
    }
    let cfg = RunConfig::new("certify", c)
        .with("eps_used", params.ta.eps)
        .with("delta3", params.delta3)
        .with("extra_held_out", args.extra_held_out)
        .with("cert_dir", args.cert_dir.display());
    output::write_table(&cfg, c.out.as_deref(), &rows)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Contract(failures.join("\n")))
    }
}
