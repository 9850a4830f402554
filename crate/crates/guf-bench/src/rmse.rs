//! Per-step root-mean-square error across Monte Carlo runs.

use crate::error::{BenchError, Result};
use nalgebra::DVector;

/// Per-step RMSE curves for one filter. Diverged runs are excluded from
/// the averages and counted in `excluded_runs`; with no surviving runs the
/// curves are infinite.
#[derive(Debug, Clone)]
pub struct RmseCurves {
    pub position_m: Vec<f64>,
    pub velocity_mps: Vec<f64>,
    pub turn_rate_radps: Vec<f64>,
    pub excluded_runs: usize,
}

/// Computes position/velocity/turn-rate RMSE over runs, state layout
/// [x, ẋ, y, ẏ, Ω].
pub fn rmse(
    truths: &[Vec<DVector<f64>>],
    estimates: &[Vec<DVector<f64>>],
    diverged: &[bool],
) -> Result<RmseCurves> {
    if truths.len() != estimates.len() || truths.len() != diverged.len() || truths.is_empty() {
        return Err(BenchError::ShapeMismatch(format!(
            "{} truth runs, {} estimate runs, {} flags",
            truths.len(),
            estimates.len(),
            diverged.len()
        )));
    }
    let steps = truths[0].len();
    for (truth, estimate) in truths.iter().zip(estimates) {
        if truth.len() != steps || estimate.len() != steps {
            return Err(BenchError::ShapeMismatch("run lengths do not agree".into()));
        }
    }

    let included: Vec<usize> = (0..truths.len()).filter(|&i| !diverged[i]).collect();
    let excluded_runs = truths.len() - included.len();
    if included.is_empty() {
        return Ok(RmseCurves {
            position_m: vec![f64::INFINITY; steps],
            velocity_mps: vec![f64::INFINITY; steps],
            turn_rate_radps: vec![f64::INFINITY; steps],
            excluded_runs,
        });
    }

    let count = included.len() as f64;
    let mut position_m = Vec::with_capacity(steps);
    let mut velocity_mps = Vec::with_capacity(steps);
    let mut turn_rate_radps = Vec::with_capacity(steps);
    for k in 0..steps {
        let mut pos = 0.0;
        let mut vel = 0.0;
        let mut turn = 0.0;
        for &i in &included {
            let e = &estimates[i][k] - &truths[i][k];
            pos += e[0] * e[0] + e[2] * e[2];
            vel += e[1] * e[1] + e[3] * e[3];
            turn += e[4] * e[4];
        }
        position_m.push((pos / count).sqrt());
        velocity_mps.push((vel / count).sqrt());
        turn_rate_radps.push((turn / count).sqrt());
    }
    Ok(RmseCurves {
        position_m,
        velocity_mps,
        turn_rate_radps,
        excluded_runs,
    })
}

pub fn mean(curve: &[f64]) -> f64 {
    curve.iter().sum::<f64>() / curve.len() as f64
}
