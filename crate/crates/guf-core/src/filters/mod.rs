//! The shared sigma-point Gaussian filter loop with pluggable sampling
//! rules, plus the closed-form linear Kalman reference.

mod hermite;
mod kalman;
mod rules;

pub use kalman::kalman_reference;
pub use rules::{
    ckf3_points, ckf5_points, gh_points, gh_points_capped, gus_points, ut_points, GusConfig,
    SamplingRule, SamplingScheme, DEFAULT_TENSOR_CAP,
};

use crate::error::Result;
use crate::gus_sampler::{GaussianBelief, SigmaSet};
use crate::numerics::{self, cholesky, SpdMatrix};
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

/// A nonlinear state-space model with additive Gaussian noise:
/// `x' = f(x) + v`, `z = h(x) + w`.
///
/// The residual and mean hooks default to plain arithmetic; models with
/// circular measurement components (bearings) override them.
pub trait StateSpaceModel {
    fn state_dim(&self) -> usize;
    fn measurement_dim(&self) -> usize;
    fn process(&self, x: &DVector<f64>) -> DVector<f64>;
    fn measure(&self, x: &DVector<f64>) -> DVector<f64>;
    fn process_noise(&self) -> &SpdMatrix;
    fn measurement_noise(&self) -> &SpdMatrix;

    /// Difference `a - b` in measurement space.
    fn measurement_residual(&self, a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
        a - b
    }

    /// Weighted mean of measurement samples.
    fn measurement_mean(&self, samples: &[DVector<f64>], weights: &[f64]) -> DVector<f64> {
        numerics::weighted_mean(samples, weights)
    }
}

/// A state-space model assembled from closures; handy in tests and for
/// one-off models.
pub struct FnModel<F, H>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
    H: Fn(&DVector<f64>) -> DVector<f64>,
{
    pub process_fn: F,
    pub measure_fn: H,
    pub process_noise: SpdMatrix,
    pub measurement_noise: SpdMatrix,
}

impl<F, H> StateSpaceModel for FnModel<F, H>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
    H: Fn(&DVector<f64>) -> DVector<f64>,
{
    fn state_dim(&self) -> usize {
        self.process_noise.dim()
    }

    fn measurement_dim(&self) -> usize {
        self.measurement_noise.dim()
    }

    fn process(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.process_fn)(x)
    }

    fn measure(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.measure_fn)(x)
    }

    fn process_noise(&self) -> &SpdMatrix {
        &self.process_noise
    }

    fn measurement_noise(&self) -> &SpdMatrix {
        &self.measurement_noise
    }
}

/// One filter step's outputs. `diverged` is set exactly when a Cholesky
/// repair failed during the step, in which case the filter coasts on the
/// prediction instead of aborting.
#[derive(Debug, Clone)]
pub struct FilterEstimate {
    pub predicted: GaussianBelief,
    pub posterior: GaussianBelief,
    pub innovation_covariance: Option<DMatrix<f64>>,
    pub cross_covariance: Option<DMatrix<f64>>,
    pub gain: Option<DMatrix<f64>>,
    pub diverged: bool,
}

impl FilterEstimate {
    fn coast(predicted: GaussianBelief, innovation_covariance: Option<DMatrix<f64>>) -> Self {
        Self {
            posterior: predicted.clone(),
            predicted,
            innovation_covariance,
            cross_covariance: None,
            gain: None,
            diverged: true,
        }
    }
}

/// Time-update output: the predicted belief together with the propagated
/// samples, which the measurement update reuses when the rule does not
/// resample.
#[derive(Debug, Clone)]
pub struct Prediction {
    pub belief: GaussianBelief,
    pub propagated: SigmaSet,
}

/// Time update: sample the belief, push the samples through the process
/// function, and recover mean and covariance plus process noise.
pub fn predict<M: StateSpaceModel + ?Sized>(
    model: &M,
    belief: &GaussianBelief,
    rule: &SamplingRule,
) -> Result<Prediction> {
    let sampled = rule.generate(belief)?;
    let propagated_points: Vec<DVector<f64>> =
        sampled.points().iter().map(|x| model.process(x)).collect();
    let weights = sampled.weights().to_vec();
    let propagated = SigmaSet::new(propagated_points, weights)?;

    let mean = propagated.weighted_mean();
    let cov = propagated.weighted_covariance_about(&mean) + model.process_noise().as_matrix();
    let belief = GaussianBelief::new(mean, SpdMatrix::from_symmetrized(cov)?)?;
    Ok(Prediction { belief, propagated })
}

/// Measurement update. With `rule.resample` the samples are regenerated
/// from the predicted belief; otherwise the propagated samples are reused.
/// An innovation-covariance factorization failure coasts (posterior =
/// predicted) with the diverged flag set.
pub fn update<M: StateSpaceModel + ?Sized>(
    model: &M,
    prediction: &Prediction,
    measurement: &DVector<f64>,
    rule: &SamplingRule,
) -> FilterEstimate {
    let predicted = &prediction.belief;
    let samples = if rule.resample {
        match rule.generate(predicted) {
            Ok(set) => set,
            Err(_) => return FilterEstimate::coast(predicted.clone(), None),
        }
    } else {
        prediction.propagated.clone()
    };

    let weights = samples.weights();
    let z_samples: Vec<DVector<f64>> = samples.points().iter().map(|x| model.measure(x)).collect();
    let z_mean = model.measurement_mean(&z_samples, weights);

    let m = model.measurement_dim();
    let n = predicted.dim();
    let mut innovation_cov = model.measurement_noise().as_matrix().clone();
    let mut cross_cov = DMatrix::<f64>::zeros(n, m);
    for ((x, z), &w) in samples.points().iter().zip(&z_samples).zip(weights) {
        let dz = model.measurement_residual(z, &z_mean);
        let dx = x - predicted.mean();
        innovation_cov.ger(w, &dz, &dz, 1.0);
        cross_cov.ger(w, &dx, &dz, 1.0);
    }

    let innovation_spd = match SpdMatrix::from_symmetrized(innovation_cov.clone()) {
        Ok(s) => s,
        Err(_) => return FilterEstimate::coast(predicted.clone(), Some(innovation_cov)),
    };
    let factor = match cholesky(&innovation_spd) {
        Ok(f) => f,
        Err(_) => return FilterEstimate::coast(predicted.clone(), Some(innovation_cov)),
    };

    // K = P_xz P_zz⁻¹ via the factor: solve P_zz Kᵀ = P_xzᵀ.
    let gain = factor.solve_matrix(&cross_cov.transpose()).transpose();
    let innovation = model.measurement_residual(measurement, &z_mean);
    let posterior_mean = predicted.mean() + &gain * innovation;
    let posterior_cov =
        predicted.covariance().as_matrix() - &gain * &innovation_cov * gain.transpose();
    let posterior_cov = match SpdMatrix::from_symmetrized(posterior_cov) {
        Ok(c) => c,
        Err(_) => return FilterEstimate::coast(predicted.clone(), Some(innovation_cov)),
    };
    let posterior = GaussianBelief::new(posterior_mean, posterior_cov)
        .expect("posterior dimensions match the prediction");

    FilterEstimate {
        predicted: predicted.clone(),
        posterior,
        innovation_covariance: Some(innovation_cov),
        cross_covariance: Some(cross_cov),
        gain: Some(gain),
        diverged: false,
    }
}

/// Folds predict/update over a measurement sequence. Divergence is
/// recorded per step, never raised: a failed prediction holds the previous
/// belief, a failed update coasts on the prediction.
pub fn run_filter<M: StateSpaceModel + ?Sized>(
    model: &M,
    initial: &GaussianBelief,
    measurements: &[DVector<f64>],
    rule: &SamplingRule,
) -> Vec<FilterEstimate> {
    let mut belief = initial.clone();
    let mut trajectory = Vec::with_capacity(measurements.len());
    for y in measurements {
        let estimate = match predict(model, &belief, rule) {
            Ok(prediction) => update(model, &prediction, y, rule),
            Err(_) => FilterEstimate::coast(belief.clone(), None),
        };
        belief = estimate.posterior.clone();
        trajectory.push(estimate);
    }
    trajectory
}
