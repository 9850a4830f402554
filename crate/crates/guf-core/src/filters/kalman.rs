//! Closed-form linear Kalman recursion, used as the equivalence oracle for
//! every sampling rule on linear-Gaussian models.

use super::FilterEstimate;
use crate::error::Result;
use crate::gus_sampler::GaussianBelief;
use crate::numerics::{cholesky, SpdMatrix};
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

/// Runs the exact Kalman filter for
/// `x' = A x + v`, `z = H x + w` with `v ~ N(0, Q)`, `w ~ N(0, R)`.
pub fn kalman_reference(
    a: &DMatrix<f64>,
    h: &DMatrix<f64>,
    q: &SpdMatrix,
    r: &SpdMatrix,
    initial: &GaussianBelief,
    measurements: &[DVector<f64>],
) -> Result<Vec<FilterEstimate>> {
    let mut belief = initial.clone();
    let mut trajectory = Vec::with_capacity(measurements.len());
    for y in measurements {
        let predicted_mean = a * belief.mean();
        let predicted_cov = a * belief.covariance().as_matrix() * a.transpose() + q.as_matrix();
        let predicted =
            GaussianBelief::new(predicted_mean, SpdMatrix::from_symmetrized(predicted_cov)?)?;

        let innovation_cov = h * predicted.covariance().as_matrix() * h.transpose() + r.as_matrix();
        let cross_cov = predicted.covariance().as_matrix() * h.transpose();
        let s = SpdMatrix::from_symmetrized(innovation_cov.clone())?;
        let factor = cholesky(&s)?;
        // K = P_xz P_zz⁻¹ through the factor: solve P_zz Kᵀ = P_xzᵀ.
        let gain = factor.solve_matrix(&cross_cov.transpose()).transpose();

        let innovation = y - h * predicted.mean();
        let posterior_mean = predicted.mean() + &gain * innovation;
        let posterior_cov =
            predicted.covariance().as_matrix() - &gain * &innovation_cov * gain.transpose();
        let posterior =
            GaussianBelief::new(posterior_mean, SpdMatrix::from_symmetrized(posterior_cov)?)?;

        belief = posterior.clone();
        trajectory.push(FilterEstimate {
            predicted,
            posterior,
            innovation_covariance: Some(innovation_cov),
            cross_covariance: Some(cross_cov),
            gain: Some(gain),
            diverged: false,
        });
    }
    Ok(trajectory)
}
