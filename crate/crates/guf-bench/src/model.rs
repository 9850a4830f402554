//! The planar coordinated-turn motion model with range-bearing radar
//! measurements. State layout: [x, ẋ, y, ẏ, Ω].

use crate::error::{BenchError, Result};
use crate::scenario::ScenarioConfig;
use guf_core::filters::StateSpaceModel;
use guf_core::SpdMatrix;
use nalgebra::{DMatrix, DVector};

/// Turn rates below this are propagated with the straight-line limit of
/// the transition matrix.
const TURN_RATE_EPS: f64 = 1e-9;

/// One coordinated-turn step: applies the Ω-dependent transition using the
/// turn rate carried in the state itself.
pub fn ct_transition(x: &DVector<f64>, dt: f64) -> DVector<f64> {
    let omega = x[4];
    let (sdt, cdt) = (omega * dt).sin_cos();
    let (a, b) = if omega.abs() < TURN_RATE_EPS {
        // sin(Ωdt)/Ω -> dt, (1 - cos(Ωdt))/Ω -> 0
        (dt, 0.0)
    } else {
        (sdt / omega, (1.0 - cdt) / omega)
    };
    DVector::from_column_slice(&[
        x[0] + a * x[1] - b * x[3],
        cdt * x[1] - sdt * x[3],
        x[2] + b * x[1] + a * x[3],
        sdt * x[1] + cdt * x[3],
        omega,
    ])
}

/// Process noise diag[q1·M, q1·M, q2·dt] with M the white-acceleration
/// block [[dt³/3, dt²/2], [dt²/2, dt]]. With `q2_literal` the third block
/// is bare q2 as some statements of the benchmark print it; the two agree
/// at dt = 1.
pub fn ct_process_noise(q1: f64, q2: f64, dt: f64, q2_literal: bool) -> SpdMatrix {
    assert!(
        q1 > 0.0 && q2 > 0.0 && dt > 0.0,
        "noise intensities and dt must be positive"
    );
    let dt2 = dt * dt;
    let dt3 = dt2 * dt;
    let mut q = DMatrix::<f64>::zeros(5, 5);
    for block in [0, 2] {
        q[(block, block)] = q1 * dt3 / 3.0;
        q[(block, block + 1)] = q1 * dt2 / 2.0;
        q[(block + 1, block)] = q1 * dt2 / 2.0;
        q[(block + 1, block + 1)] = q1 * dt;
    }
    q[(4, 4)] = if q2_literal { q2 } else { q2 * dt };
    SpdMatrix::new(q).expect("construction is symmetric")
}

/// Range and bearing of the position components, bearing in (-π, π].
pub fn range_bearing(x: &DVector<f64>) -> Result<(f64, f64)> {
    let (px, py) = (x[0], x[2]);
    if px == 0.0 && py == 0.0 {
        return Err(BenchError::OriginSingular);
    }
    Ok((px.hypot(py), py.atan2(px)))
}

/// Wraps an angle into (-π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut w = a.rem_euclid(two_pi);
    if w > std::f64::consts::PI {
        w -= two_pi;
    }
    w
}

/// The benchmark's state-space model. The bearing component gets a wrapped
/// residual and a circular weighted mean so the filter core can stay
/// agnostic about angles.
#[derive(Debug, Clone)]
pub struct CoordinatedTurnModel {
    dt: f64,
    process_noise: SpdMatrix,
    measurement_noise: SpdMatrix,
}

impl CoordinatedTurnModel {
    pub fn new(config: &ScenarioConfig) -> Self {
        Self {
            dt: config.dt_s,
            process_noise: ct_process_noise(config.q1, config.q2, config.dt_s, config.q2_literal),
            measurement_noise: SpdMatrix::from_diagonal(&[config.sigma_r, config.sigma_theta])
                .expect("positive noise variances"),
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }
}

impl StateSpaceModel for CoordinatedTurnModel {
    fn state_dim(&self) -> usize {
        5
    }

    fn measurement_dim(&self) -> usize {
        2
    }

    fn process(&self, x: &DVector<f64>) -> DVector<f64> {
        ct_transition(x, self.dt)
    }

    fn measure(&self, x: &DVector<f64>) -> DVector<f64> {
        // IEEE atan2(0, 0) = 0; the exact origin is unreachable for the
        // benchmark trajectories.
        DVector::from_column_slice(&[x[0].hypot(x[2]), x[2].atan2(x[0])])
    }

    fn process_noise(&self) -> &SpdMatrix {
        &self.process_noise
    }

    fn measurement_noise(&self) -> &SpdMatrix {
        &self.measurement_noise
    }

    fn measurement_residual(&self, a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
        DVector::from_column_slice(&[a[0] - b[0], wrap_angle(a[1] - b[1])])
    }

    fn measurement_mean(&self, samples: &[DVector<f64>], weights: &[f64]) -> DVector<f64> {
        let mut range = 0.0;
        let mut sin_sum = 0.0;
        let mut cos_sum = 0.0;
        for (z, &w) in samples.iter().zip(weights) {
            range += w * z[0];
            sin_sum += w * z[1].sin();
            cos_sum += w * z[1].cos();
        }
        DVector::from_column_slice(&[range, sin_sum.atan2(cos_sum)])
    }
}
