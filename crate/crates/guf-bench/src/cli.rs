//! Command-line surface: quantile queries, sigma-set inspection, benchmark
//! execution and summary comparison.

use crate::error::{BenchError, Result};
use crate::monte_carlo::monte_carlo;
use crate::report::{
    self, filter_summaries, load_summary, output_paths, rmse_csv, sigma_set_csv, RunSummary,
    SUMMARY_SCHEMA,
};
use crate::rules::parse_rules;
use crate::scenario::ScenarioConfig;
use clap::{Parser, Subcommand};
use guf_core::numerics::{chi_square_upper_quantile, relative_frobenius};
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "guf",
    version,
    about = "Sigma-point Gaussian filters and the coordinated-turn tracking benchmark"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the squared shell radii for importance levels d in (0, 1].
    Quantile {
        /// State dimension n.
        #[arg(long)]
        dim: usize,
        /// Comma-separated level values.
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<f64>,
    },
    /// Generate a sigma set for a belief file and export it as CSV.
    Sample {
        /// TOML file with `mean = [...]` and `covariance = [[...], ...]`.
        #[arg(long)]
        belief: PathBuf,
        /// Rule spec, e.g. ckf3, gukf:kappa=1 or guf:n=3,mode=grid-closed,design=cum:2.
        #[arg(long)]
        rule: String,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the Monte Carlo tracking benchmark for a scenario.
    Bench {
        /// Bundled name (scenario1..scenario4) or a scenario TOML path.
        #[arg(long)]
        scenario: String,
        /// Rule specs; defaults to the scenario file's rule list.
        #[arg(long, value_delimiter = ',')]
        rules: Vec<String>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for rmse.csv and summary.json.
        #[arg(long, default_value = "bench-out")]
        out: PathBuf,
        /// Use the turn-rate noise intensity exactly as configured instead
        /// of scaling it by dt.
        #[arg(long)]
        q2_literal: bool,
    },
    /// Compare two or more benchmark summary files side by side.
    Compare {
        #[arg(required = true, num_args = 2..)]
        summaries: Vec<PathBuf>,
    },
}

pub fn run() -> Result<()> {
    let cli = Cli::parse();
    dispatch(cli.command, &mut std::io::stdout())
}

fn dispatch(command: Command, out: &mut impl std::io::Write) -> Result<()> {
    match command {
        Command::Quantile { dim, d } => cmd_quantile(dim, &d, out),
        Command::Sample {
            belief,
            rule,
            out: path,
        } => cmd_sample(&belief, &rule, path, out),
        Command::Bench {
            scenario,
            rules,
            runs,
            steps,
            seed,
            out: dir,
            q2_literal,
        } => cmd_bench(&scenario, &rules, runs, steps, seed, &dir, q2_literal, out),
        Command::Compare { summaries } => cmd_compare(&summaries, out),
    }
}

fn cmd_quantile(dim: usize, levels: &[f64], out: &mut impl std::io::Write) -> Result<()> {
    if dim == 0 {
        return Err(BenchError::Config("--dim must be at least 1".into()));
    }
    for &d in levels {
        if !(d > 0.0 && d <= 1.0) {
            return Err(BenchError::Config(format!(
                "level value {d} outside (0, 1]"
            )));
        }
    }
    let _ = writeln!(out, "{:>12} {:>18}", "d", "r");
    for &d in levels {
        let r = chi_square_upper_quantile(dim, d)?;
        let _ = writeln!(out, "{d:>12.6} {r:>18.10}");
    }
    Ok(())
}

fn cmd_sample(
    belief_path: &std::path::Path,
    rule_spec: &str,
    csv_path: Option<PathBuf>,
    out: &mut impl std::io::Write,
) -> Result<()> {
    let belief = report::load_belief(belief_path)?;
    let rules = parse_rules(&[rule_spec.to_string()], belief.dim())?;
    if rules.len() != 1 {
        return Err(BenchError::Config(
            "sample takes exactly one rule spec".into(),
        ));
    }
    let named = &rules[0];
    let set = named.rule.generate(&belief)?;

    let mean_residual = (set.weighted_mean() - belief.mean()).amax();
    let cov_residual = relative_frobenius(
        &set.weighted_covariance_about(belief.mean()),
        belief.covariance().as_matrix(),
    );
    let _ = writeln!(out, "rule: {}", named.name);
    let _ = writeln!(out, "points: {}", set.len());
    if let Some(meta) = set.gus_meta() {
        let _ = writeln!(out, "stretch beta: {:.6}", meta.stretch);
    }
    let _ = writeln!(out, "weight sum residual: {:.3e}", set.weight_sum() - 1.0);
    let _ = writeln!(out, "min weight: {:.6e}", set.min_weight());
    let _ = writeln!(out, "mean residual (max abs): {mean_residual:.3e}");
    let _ = writeln!(
        out,
        "covariance residual (rel Frobenius): {cov_residual:.3e}"
    );

    let csv = sigma_set_csv(&set);
    match csv_path {
        Some(path) => {
            report::write_text(&path, &csv)?;
            let _ = writeln!(out, "wrote {}", path.display());
        }
        None => {
            let _ = write!(out, "{csv}");
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    scenario: &str,
    rule_args: &[String],
    runs: Option<usize>,
    steps: Option<usize>,
    seed: Option<u64>,
    dir: &std::path::Path,
    q2_literal: bool,
    out: &mut impl std::io::Write,
) -> Result<()> {
    let started = Instant::now();
    let mut config = ScenarioConfig::load(scenario)?;
    if let Some(runs) = runs {
        config.runs = runs;
    }
    if let Some(steps) = steps {
        config.steps = steps;
    }
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if q2_literal {
        config.q2_literal = true;
    }
    if config.runs == 0 || config.steps == 0 {
        return Err(BenchError::Config(
            "runs and steps must be at least 1".into(),
        ));
    }

    let rule_tokens: Vec<String> = if rule_args.is_empty() {
        config.rules.clone()
    } else {
        rule_args.to_vec()
    };
    let rules = parse_rules(&rule_tokens, 5)?;

    let reports = monte_carlo(&config, &rules)?;

    let (csv_path, summary_path) = output_paths(dir);
    report::write_text(&csv_path, &rmse_csv(&reports))?;

    let command = format!(
        "bench --scenario {} --rules {} --runs {} --steps {} --seed {}{}",
        scenario,
        rules
            .iter()
            .map(|r| r.name.clone())
            .collect::<Vec<_>>()
            .join(","),
        config.runs,
        config.steps,
        config.seed,
        if config.q2_literal {
            " --q2-literal"
        } else {
            ""
        },
    );
    let summary = RunSummary {
        schema: SUMMARY_SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION"),
        command,
        seed: config.seed,
        common_random_numbers: true,
        config: &config,
        filters: filter_summaries(&reports),
        outputs: vec![csv_path.display().to_string()],
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| BenchError::Config(format!("cannot serialize summary: {e}")))?;
    report::write_text(&summary_path, &json)?;

    let _ = writeln!(
        out,
        "{:<32} {:>8} {:>14} {:>12} {:>9}",
        "filter", "samples", "mean pos RMSE", "runtime s", "diverged"
    );
    for f in &summary.filters {
        let _ = writeln!(
            out,
            "{:<32} {:>8} {:>14.4} {:>12.4} {:>9}",
            f.name, f.sample_count, f.mean_rmse_pos_m, f.runtime_s, f.diverged_runs
        );
    }
    let _ = writeln!(out, "wrote {}", csv_path.display());
    let _ = writeln!(out, "wrote {}", summary_path.display());
    Ok(())
}

fn cmd_compare(paths: &[PathBuf], out: &mut impl std::io::Write) -> Result<()> {
    let summaries: Vec<(String, report::LoadedSummary)> = paths
        .iter()
        .map(|p| {
            let label = p
                .parent()
                .and_then(|d| d.file_name())
                .or_else(|| p.file_stem())
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string());
            load_summary(p).map(|s| (label, s))
        })
        .collect::<Result<_>>()?;

    let baseline = &summaries[0];
    let _ = writeln!(
        out,
        "{:<32} {:<14} {:>8} {:>14} {:>12} {:>9}",
        "filter", "summary", "samples", "mean pos RMSE", "runtime s", "diverged"
    );
    for filter in &baseline.1.filters {
        for (label, summary) in &summaries {
            if let Some(found) = summary.filters.iter().find(|f| f.name == filter.name) {
                let _ = writeln!(
                    out,
                    "{:<32} {:<14} {:>8} {:>14.4} {:>12.4} {:>9}",
                    found.name,
                    label,
                    found.sample_count,
                    found.mean_rmse_pos_m,
                    found.runtime_s,
                    found.diverged_runs
                );
            }
        }
        // Deltas and runtime ratios against the baseline entry.
        for (label, summary) in summaries.iter().skip(1) {
            if let Some(found) = summary.filters.iter().find(|f| f.name == filter.name) {
                let delta = found.mean_rmse_pos_m - filter.mean_rmse_pos_m;
                let ratio = if filter.runtime_s > 0.0 {
                    found.runtime_s / filter.runtime_s
                } else {
                    f64::NAN
                };
                let _ = writeln!(
                    out,
                    "{:<32} {:<14} {:>8} {:>+14.4} {:>11.3}x {:>9}",
                    "",
                    format!("Δ {label}"),
                    "",
                    delta,
                    ratio,
                    ""
                );
            }
        }
    }
    // Cross-filter runtime ratios within the baseline (slowest over fastest
    // pairs are easiest read off the table; print explicit pairings).
    let filters = &baseline.1.filters;
    for a in filters {
        for b in filters {
            if a.name < b.name && a.runtime_s > 0.0 {
                let _ = writeln!(
                    out,
                    "runtime {} / {} = {:.3}",
                    b.name,
                    a.name,
                    b.runtime_s / a.runtime_s
                );
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_prints_reference_radii() {
        let mut buffer = Vec::new();
        cmd_quantile(2, &[1.0 / 3.0, 2.0 / 3.0, 1.0], &mut buffer).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        assert!(text.contains("2.1972"), "{text}");
        assert!(text.contains("0.8109"), "{text}");
        let last = text.lines().last().unwrap();
        assert!(last.trim().ends_with("0.0000000000"), "{last}");
    }

    #[test]
    fn quantile_rejects_out_of_range_levels() {
        let mut buffer = Vec::new();
        assert!(cmd_quantile(2, &[0.0], &mut buffer).is_err());
        assert!(cmd_quantile(2, &[1.5], &mut buffer).is_err());
    }
}
