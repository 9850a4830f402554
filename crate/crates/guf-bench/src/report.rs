//! Output files: the RMSE CSV, the JSON run summary (which doubles as the
//! reproduction manifest), and the sigma-set CSV.

use crate::error::{BenchError, Result};
use crate::monte_carlo::RmseReport;
use crate::scenario::ScenarioConfig;
use guf_core::SigmaSet;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const SUMMARY_SCHEMA: u32 = 1;

/// Renders the per-step RMSE table, rows sorted by step then filter name.
pub fn rmse_csv(reports: &[RmseReport]) -> String {
    let mut sorted: Vec<&RmseReport> = reports.iter().collect();
    sorted.sort_by(|a, b| a.filter.cmp(&b.filter));
    let steps = sorted.first().map_or(0, |r| r.curves.position_m.len());

    let mut out = String::from("step,filter,rmse_pos_m,rmse_vel_mps,rmse_turn_radps\n");
    for step in 0..steps {
        for report in &sorted {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                step + 1,
                report.filter,
                report.curves.position_m[step],
                report.curves.velocity_mps[step],
                report.curves.turn_rate_radps[step],
            );
        }
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilterSummary {
    pub name: String,
    pub sample_count: usize,
    pub runtime_s: f64,
    pub diverged_runs: usize,
    pub mean_rmse_pos_m: f64,
    pub mean_rmse_vel_mps: f64,
    pub mean_rmse_turn_radps: f64,
}

/// The JSON summary written next to the CSV: everything needed to
/// reproduce the run byte for byte, plus per-filter aggregates.
#[derive(Debug, Serialize)]
pub struct RunSummary<'a> {
    pub schema: u32,
    pub tool_version: &'static str,
    pub command: String,
    pub seed: u64,
    /// All filters consume identical noise realizations per run.
    pub common_random_numbers: bool,
    pub config: &'a ScenarioConfig,
    pub filters: Vec<FilterSummary>,
    pub outputs: Vec<String>,
    pub wall_time_s: f64,
}

/// The subset of the summary that `compare` consumes.
#[derive(Debug, Deserialize)]
pub struct LoadedSummary {
    pub schema: u32,
    pub tool_version: String,
    pub seed: u64,
    pub filters: Vec<FilterSummary>,
}

pub fn filter_summaries(reports: &[RmseReport]) -> Vec<FilterSummary> {
    reports
        .iter()
        .map(|r| FilterSummary {
            name: r.filter.clone(),
            sample_count: r.sample_count,
            runtime_s: r.runtime_s,
            diverged_runs: r.diverged_runs,
            mean_rmse_pos_m: r.mean_position_rmse(),
            mean_rmse_vel_mps: r.mean_velocity_rmse(),
            mean_rmse_turn_radps: r.mean_turn_rate_rmse(),
        })
        .collect()
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|source| BenchError::Write {
                path: parent.to_path_buf(),
                source,
            })?;
        }
    }
    std::fs::write(path, text).map_err(|source| BenchError::Write {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_summary(path: &Path) -> Result<LoadedSummary> {
    let text = std::fs::read_to_string(path).map_err(|source| BenchError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let summary: LoadedSummary = serde_json::from_str(&text).map_err(|e| BenchError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    if summary.schema != SUMMARY_SCHEMA {
        return Err(BenchError::Parse {
            path: path.to_path_buf(),
            message: format!(
                "summary schema {} does not match expected {}",
                summary.schema, SUMMARY_SCHEMA
            ),
        });
    }
    Ok(summary)
}

/// Sigma-set export: one row per point with its level metadata (empty for
/// rules without levels).
pub fn sigma_set_csv(set: &SigmaSet) -> String {
    let dim = set.dim();
    let mut out = String::from("level,d,r,weight");
    for i in 0..dim {
        let _ = write!(out, ",x{i}");
    }
    out.push('\n');
    for (idx, (point, weight)) in set.points().iter().zip(set.weights()).enumerate() {
        match set.gus_meta() {
            Some(meta) => {
                let k = meta.level_of[idx];
                let level = &meta.levels[k];
                let _ = write!(out, "{},{},{},{}", k + 1, level.d(), level.r(), weight);
            }
            None => {
                let _ = write!(out, "1,,,{weight}");
            }
        }
        for i in 0..dim {
            let _ = write!(out, ",{}", point[i]);
        }
        out.push('\n');
    }
    out
}

/// Filter trajectory export: step, posterior mean components, covariance
/// diagonal, diverged flag.
pub fn trajectory_csv(estimates: &[guf_core::filters::FilterEstimate]) -> String {
    let mut out = String::new();
    let Some(first) = estimates.first() else {
        return out;
    };
    let n = first.posterior.dim();
    out.push_str("step");
    for i in 0..n {
        let _ = write!(out, ",mean{i}");
    }
    for i in 0..n {
        let _ = write!(out, ",var{i}");
    }
    out.push_str(",diverged\n");
    for (step, estimate) in estimates.iter().enumerate() {
        let _ = write!(out, "{}", step + 1);
        for i in 0..n {
            let _ = write!(out, ",{}", estimate.posterior.mean()[i]);
        }
        for i in 0..n {
            let _ = write!(
                out,
                ",{}",
                estimate.posterior.covariance().as_matrix()[(i, i)]
            );
        }
        let _ = writeln!(out, ",{}", estimate.diverged);
    }
    out
}

/// Belief file schema for the `sample` command.
#[derive(Debug, Deserialize)]
pub struct BeliefFile {
    pub mean: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
}

pub fn load_belief(path: &Path) -> Result<guf_core::GaussianBelief> {
    let text = std::fs::read_to_string(path).map_err(|source| BenchError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let file: BeliefFile = toml::from_str(&text).map_err(|e| BenchError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let n = file.mean.len();
    if file.covariance.len() != n || file.covariance.iter().any(|row| row.len() != n) {
        return Err(BenchError::Parse {
            path: path.to_path_buf(),
            message: format!("covariance must be {n}x{n} to match the mean"),
        });
    }
    let cov = nalgebra::DMatrix::from_fn(n, n, |i, j| file.covariance[i][j]);
    let spd = guf_core::SpdMatrix::new(cov).map_err(|e| BenchError::Parse {
        path: path.to_path_buf(),
        message: format!("covariance: {e}"),
    })?;
    guf_core::GaussianBelief::new(nalgebra::DVector::from_vec(file.mean), spd)
        .map_err(BenchError::from)
}

pub fn output_paths(dir: &Path) -> (PathBuf, PathBuf) {
    (dir.join("rmse.csv"), dir.join("summary.json"))
}
