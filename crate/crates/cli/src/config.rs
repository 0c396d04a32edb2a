use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every command.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Magnetic flux a in [0, 1/2].
    #[arg(long, default_value_t = 0.25)]
    pub a: f64,
    /// Spectral shift lambda.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Regularization eps of T_a; defaults to min(1/2, (lambda + a^2)/(2a)).
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Everything that determines a run, echoed into output headers.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub a: f64,
    pub lambda: f64,
    pub eps: Option<f64>,
    pub seed: u64,
    pub format: Format,
    pub params: Vec<(&'static str, String)>,
}

impl RunConfig {
    pub fn new(command: &'static str, common: &CommonArgs) -> Self {
        Self {
            command,
            a: common.a,
            lambda: common.lambda,
            eps: common.eps,
            seed: common.seed,
            format: common.format,
            params: Vec::new(),
        }
    }

    pub fn with(mut self, key: &'static str, value: impl ToString) -> Self {
        self.params.push((key, value.to_string()));
        self
    }

    /// `key=value` pairs in a fixed order.
    pub fn entries(&self) -> Vec<(String, String)> {
        let mut v = vec![
            ("command".to_string(), self.command.to_string()),
            ("a".to_string(), self.a.to_string()),
            ("lambda".to_string(), self.lambda.to_string()),
            (
                "eps".to_string(),
                self.eps.map_or_else(|| "default".to_string(), |e| e.to_string()),
            ),
            ("seed".to_string(), self.seed.to_string()),
        ];
        v.extend(self.params.iter().map(|(k, val)| (k.to_string(), val.clone())));
        v
    }
}

pub fn require_nonempty(name: &str, list: &[f64]) -> Result<(), Failure> {
    if list.is_empty() {
        return Err(Failure::Usage(format!("--{name} must not be empty")));
    }
    if let Some(bad) = list.iter().find(|x| !x.is_finite()) {
        return Err(Failure::Usage(format!("--{name} contains non-finite value {bad}")));
    }
    Ok(())
}

pub fn join(list: &[f64]) -> String {
    list.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(";")
}

/// Maps precondition failures of the library to usage errors.
pub fn usage<T>(r: abmoser::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Usage(e.to_string()))
}
