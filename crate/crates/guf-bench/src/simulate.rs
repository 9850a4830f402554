//! Truth and measurement simulation, bit-reproducible from (seed, run).

use crate::error::Result;
use crate::model::{ct_process_noise, CoordinatedTurnModel};
use crate::scenario::ScenarioConfig;
use guf_core::filters::StateSpaceModel;
use guf_core::numerics::{cholesky, LowerTriangularFactor, SeededRandomSource};
use nalgebra::DVector;

/// One run's truth trajectory and measurement sequence. Row i of both
/// corresponds to time step i+1; the initial state lives in the config.
#[derive(Debug, Clone)]
pub struct SimulationRecord {
    pub truth: Vec<DVector<f64>>,
    pub measurements: Vec<DVector<f64>>,
    pub seed: u64,
    pub run: u64,
}

fn correlated_draw(factor: &LowerTriangularFactor, rng: &mut SeededRandomSource) -> DVector<f64> {
    let n = factor.dim();
    let white = DVector::from_fn(n, |_, _| rng.next_standard_normal());
    factor.matrix() * white
}

/// Simulates one Monte Carlo run. Draw order per step is fixed: process
/// noise first, then (for the mixture) the component selector, then the
/// measurement noise — replaying with the same (seed, run) reproduces the
/// record bit for bit.
pub fn simulate(config: &ScenarioConfig, run: u64) -> Result<SimulationRecord> {
    let mut rng = SeededRandomSource::new(config.seed, run);
    let model = CoordinatedTurnModel::new(config);
    let process_factor = cholesky(&ct_process_noise(
        config.q1,
        config.q2,
        config.dt_s,
        config.q2_literal,
    ))?;

    enum MeasurementNoise {
        Diagonal {
            sigma_r: f64,
            sigma_theta: f64,
        },
        Mixture {
            weight_first: f64,
            first: LowerTriangularFactor,
            second: LowerTriangularFactor,
        },
    }
    let measurement_noise = match &config.mixture {
        None => MeasurementNoise::Diagonal {
            sigma_r: config.sigma_r.sqrt(),
            sigma_theta: config.sigma_theta.sqrt(),
        },
        Some(mix) => MeasurementNoise::Mixture {
            weight_first: mix.weight_first,
            first: cholesky(&mix.r1_matrix()?)?,
            second: cholesky(&mix.r2_matrix()?)?,
        },
    };

    let mut state = config.initial_state_vector();
    let mut truth = Vec::with_capacity(config.steps);
    let mut measurements = Vec::with_capacity(config.steps);
    for _ in 0..config.steps {
        state = model.process(&state) + correlated_draw(&process_factor, &mut rng);
        let noise = match &measurement_noise {
            MeasurementNoise::Diagonal {
                sigma_r,
                sigma_theta,
            } => DVector::from_column_slice(&[
                sigma_r * rng.next_standard_normal(),
                sigma_theta * rng.next_standard_normal(),
            ]),
            MeasurementNoise::Mixture {
                weight_first,
                first,
                second,
            } => {
                let pick_first = rng.next_uniform() < *weight_first;
                let factor = if pick_first { first } else { second };
                correlated_draw(factor, &mut rng)
            }
        };
        measurements.push(model.measure(&state) + noise);
        truth.push(state.clone());
    }

    Ok(SimulationRecord {
        truth,
        measurements,
        seed: config.seed,
        run,
    })
}
