//! Trial records, CSV emission and summary statistics.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

/// One estimator trial. Wall time is kept out of the CSV so reports are
/// byte-identical across reruns of the same master seed; aggregates land in
/// the summary instead.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub derived_seed: u64,
    pub true_support: u64,
    pub estimate: f64,
    pub success: bool,
    pub queries_used: u64,
    pub contract_void: bool,
    #[serde(skip)]
    pub wall_time_ms: f64,
}

pub const CSV_HEADER: &str =
    "trial_index,derived_seed,true_support,estimate,success,queries_used,contract_void";

impl TrialRecord {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.trial_index,
            self.derived_seed,
            self.true_support,
            self.estimate,
            self.success,
            self.queries_used,
            self.contract_void
        )
    }

    /// The success flag recomputed from (omega, estimate, eps); always equals
    /// the stored flag.
    pub fn recompute_success(&self, eps: f64) -> bool {
        self.estimate >= self.true_support as f64 / (1.0 + eps)
            && self.estimate <= (1.0 + eps) * self.true_support as f64
    }
}

/// 95% Wilson score interval for a binomial fraction.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959963984540054f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = (z / denom) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub config: serde_json::Value,
    pub rng_algorithm: String,
    pub trials: u64,
    pub successes: u64,
    pub success_fraction: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub mean_queries: f64,
    pub median_queries: f64,
    pub total_wall_ms: f64,
    pub mean_wall_ms: f64,
    pub nonadaptive_calibration: Option<String>,
}

pub fn summarize(config: serde_json::Value, records: &[TrialRecord], nonadaptive: bool) -> Summary {
    let trials = records.len() as u64;
    let successes = records.iter().filter(|r| r.success).count() as u64;
    let (lo, hi) = wilson_interval(successes, trials);
    let mut queries: Vec<u64> = records.iter().map(|r| r.queries_used).collect();
    queries.sort_unstable();
    let mean_queries = if trials == 0 {
        0.0
    } else {
        queries.iter().map(|&q| q as f64).sum::<f64>() / trials as f64
    };
    let median_queries = if queries.is_empty() {
        0.0
    } else if queries.len() % 2 == 1 {
        queries[queries.len() / 2] as f64
    } else {
        (queries[queries.len() / 2 - 1] + queries[queries.len() / 2]) as f64 / 2.0
    };
    let total_wall_ms: f64 = records.iter().map(|r| r.wall_time_ms).sum();
    Summary {
        config,
        rng_algorithm: cond_core::RNG_ALGORITHM.to_string(),
        trials,
        successes,
        success_fraction: if trials == 0 {
            0.0
        } else {
            successes as f64 / trials as f64
        },
        wilson_low: lo,
        wilson_high: hi,
        mean_queries,
        median_queries,
        total_wall_ms,
        mean_wall_ms: if trials == 0 {
            0.0
        } else {
            total_wall_ms / trials as f64
        },
        nonadaptive_calibration: nonadaptive.then(|| "stand-in".to_string()),
    }
}

/// Writes records sorted by trial index, either as CSV (header + one line
/// per trial) or a JSON array.
pub fn write_records(path: &Path, records: &[TrialRecord], format: &str) -> Result<()> {
    let mut file = std::fs::File::create(path)
        .with_context(|| format!("creating {}", path.display()))?;
    match format {
        "json" => {
            serde_json::to_writer_pretty(&mut file, records)?;
            writeln!(file)?;
        }
        _ => {
            writeln!(file, "{CSV_HEADER}")?;
            for r in records {
                writeln!(file, "{}", r.csv_line())?;
            }
        }
    }
    Ok(())
}

pub fn summary_path(out: &Path) -> std::path::PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".summary.json");
    out.with_file_name(name)
}
