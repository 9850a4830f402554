//! Monte Carlo execution: common random numbers across filters, one
//! random stream per run, deterministic aggregation by run index.

use crate::error::Result;
use crate::model::CoordinatedTurnModel;
use crate::rmse::{mean, rmse, RmseCurves};
use crate::scenario::ScenarioConfig;
use crate::simulate::{simulate, SimulationRecord};
use guf_core::filters::{run_filter, SamplingRule};
use guf_core::gus_sampler::GaussianBelief;
use nalgebra::DVector;
use rayon::prelude::*;
use std::time::Instant;

/// A sampling rule with its display name (the parsed spec string).
#[derive(Debug, Clone)]
pub struct NamedRule {
    pub name: String,
    pub rule: SamplingRule,
}

/// Aggregated benchmark result for one filter.
#[derive(Debug, Clone)]
pub struct RmseReport {
    pub filter: String,
    pub curves: RmseCurves,
    /// Total filtering time across runs, seconds.
    pub runtime_s: f64,
    pub diverged_runs: usize,
    pub sample_count: usize,
}

impl RmseReport {
    pub fn mean_position_rmse(&self) -> f64 {
        mean(&self.curves.position_m)
    }

    pub fn mean_velocity_rmse(&self) -> f64 {
        mean(&self.curves.velocity_mps)
    }

    pub fn mean_turn_rate_rmse(&self) -> f64 {
        mean(&self.curves.turn_rate_radps)
    }
}

struct RunOutput {
    truth: Vec<DVector<f64>>,
    // Per rule: posterior means, diverged flag, elapsed seconds.
    estimates: Vec<(Vec<DVector<f64>>, bool, f64)>,
}

/// Runs every rule over the same simulated records ("all filters
/// initialized with the same condition") and aggregates per-step RMSE.
/// Runs execute in parallel; results merge by run index, so the report is
/// independent of scheduling.
pub fn monte_carlo(config: &ScenarioConfig, rules: &[NamedRule]) -> Result<Vec<RmseReport>> {
    let model = CoordinatedTurnModel::new(config);
    let initial = GaussianBelief::new(config.initial_state_vector(), config.initial_covariance())
        .expect("config dimensions are consistent");

    let outputs: Vec<Result<RunOutput>> = (0..config.runs as u64)
        .into_par_iter()
        .map(|run| {
            let record: SimulationRecord = simulate(config, run)?;
            let estimates = rules
                .iter()
                .map(|named| {
                    let start = Instant::now();
                    let trajectory =
                        run_filter(&model, &initial, &record.measurements, &named.rule);
                    let elapsed = start.elapsed().as_secs_f64();
                    let diverged = trajectory.iter().any(|e| e.diverged);
                    let means: Vec<DVector<f64>> = trajectory
                        .into_iter()
                        .map(|e| e.posterior.mean().clone())
                        .collect();
                    (means, diverged, elapsed)
                })
                .collect();
            Ok(RunOutput {
                truth: record.truth,
                estimates,
            })
        })
        .collect();
    let outputs: Vec<RunOutput> = outputs.into_iter().collect::<Result<_>>()?;

    let truths: Vec<Vec<DVector<f64>>> = outputs.iter().map(|o| o.truth.clone()).collect();
    let mut reports = Vec::with_capacity(rules.len());
    for (idx, named) in rules.iter().enumerate() {
        let estimates: Vec<Vec<DVector<f64>>> =
            outputs.iter().map(|o| o.estimates[idx].0.clone()).collect();
        let diverged: Vec<bool> = outputs.iter().map(|o| o.estimates[idx].1).collect();
        let runtime_s: f64 = outputs.iter().map(|o| o.estimates[idx].2).sum();
        let curves = rmse(&truths, &estimates, &diverged)?;
        let diverged_runs = curves.excluded_runs;
        reports.push(RmseReport {
            filter: named.name.clone(),
            curves,
            runtime_s,
            diverged_runs,
            sample_count: named.rule.point_count(5),
        });
    }
    Ok(reports)
}
