//! Run configuration shared by the subcommands.

use std::path::PathBuf;

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// Default seed when neither --seed nor QTRADEOFF_SEED is given.
pub const DEFAULT_SEED: u64 = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub n: Vec<u32>,
    pub k_list: Option<Vec<i32>>,
    pub x_points: usize,
    pub samples: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
    pub relative: bool,
}

impl RunConfig {
    /// Enforces the configuration invariants; violations are usage errors.
    pub fn validate(&self) -> Result<(), String> {
        if self.n.is_empty() {
            return Err("at least one --n value is required".into());
        }
        if self.n.iter().any(|&n| n < 1) {
            return Err("--n must be at least 1".into());
        }
        if self.x_points < 2 {
            return Err("--x-points must be at least 2".into());
        }
        if self.samples < 1000 {
            return Err("--samples must be at least 1000".into());
        }
        if let Some(ks) = &self.k_list {
            for (&n, &k) in self.n.iter().flat_map(|n| ks.iter().map(move |k| (n, k))) {
                if k < 0 || k as u32 > n {
                    return Err(format!("--k {k} is outside 0..={n} for --n {n}"));
                }
            }
        }
        Ok(())
    }

    /// The seed resolution order: --seed flag, then QTRADEOFF_SEED, then the
    /// built-in default.
    pub fn resolve_seed(flag: Option<u64>) -> u64 {
        flag.or_else(|| {
            std::env::var("QTRADEOFF_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(DEFAULT_SEED)
    }
}
