//! Scenario configuration: the TOML schema keeps the benchmark's published
//! units (degrees, milliradians); the resolved config is SI/radians
//! throughout.

use crate::error::{BenchError, Result};
use guf_core::SpdMatrix;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::path::Path;

const DEG: f64 = std::f64::consts::PI / 180.0;
/// mrad^2 -> rad^2
const MRAD2: f64 = 1e-6;
/// m*mrad -> m*rad (mixture cross terms)
const MRAD: f64 = 1e-3;

/// Raw scenario file contents in the customary benchmark units.
#[derive(Debug, Clone, Deserialize)]
pub struct ScenarioFile {
    pub name: String,
    pub steps: usize,
    pub runs: usize,
    pub seed: u64,
    pub dt_s: f64,
    pub turn_rate_deg_s: f64,
    pub q1_m2_s3: f64,
    pub q2_s3: f64,
    pub sigma_r_m2: f64,
    pub sigma_theta_mrad2: f64,
    /// Use the turn-rate noise intensity q2 as printed instead of q2*dt.
    #[serde(default)]
    pub q2_literal: bool,
    /// [m, m/s, m, m/s, deg/s]
    pub initial_state: [f64; 5],
    /// [m^2, m^2/s^2, m^2, m^2/s^2, mrad^2/s^2]
    pub initial_cov_diag: [f64; 5],
    #[serde(default)]
    pub rules: Vec<String>,
    #[serde(default)]
    pub mixture: Option<MixtureFile>,
}

/// Mixture noise block; matrices in [m^2, m*mrad; m*mrad, mrad^2].
#[derive(Debug, Clone, Deserialize)]
pub struct MixtureFile {
    pub weight_first: f64,
    pub r1: [[f64; 2]; 2],
    pub r2: [[f64; 2]; 2],
}

/// Resolved mixture measurement noise in radians.
#[derive(Debug, Clone, Serialize)]
pub struct MixtureNoise {
    pub weight_first: f64,
    pub r1: Vec<Vec<f64>>,
    pub r2: Vec<Vec<f64>>,
}

impl MixtureNoise {
    pub fn r1_matrix(&self) -> Result<SpdMatrix> {
        to_spd(&self.r1)
    }

    pub fn r2_matrix(&self) -> Result<SpdMatrix> {
        to_spd(&self.r2)
    }
}

fn to_spd(rows: &[Vec<f64>]) -> Result<SpdMatrix> {
    let m = DMatrix::from_fn(2, 2, |i, j| rows[i][j]);
    SpdMatrix::new(m).map_err(BenchError::from)
}

/// A fully resolved scenario: SI units, radians everywhere.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub steps: usize,
    pub runs: usize,
    pub seed: u64,
    pub dt_s: f64,
    pub turn_rate_rad_s: f64,
    pub q1: f64,
    pub q2: f64,
    pub q2_literal: bool,
    /// Range noise variance, m^2.
    pub sigma_r: f64,
    /// Bearing noise variance, rad^2.
    pub sigma_theta: f64,
    /// [m, m/s, m, m/s, rad/s]
    pub initial_state: Vec<f64>,
    /// Diagonal of P0: [m^2, m^2/s^2, m^2, m^2/s^2, rad^2/s^2]
    pub initial_cov_diag: Vec<f64>,
    pub rules: Vec<String>,
    pub mixture: Option<MixtureNoise>,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| BenchError::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::resolve(file)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| BenchError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text, path)
    }

    /// Loads a bundled scenario by name, or a scenario file by path.
    pub fn load(name_or_path: &str) -> Result<Self> {
        if let Some(text) = bundled_scenario(name_or_path) {
            return Self::from_toml_str(text, Path::new(name_or_path));
        }
        Self::from_file(Path::new(name_or_path))
    }

    fn resolve(file: ScenarioFile) -> Result<Self> {
        if file.steps == 0 || file.runs == 0 {
            return Err(BenchError::Config(
                "steps and runs must be at least 1".into(),
            ));
        }
        if file.dt_s <= 0.0 {
            return Err(BenchError::Config("dt_s must be positive".into()));
        }
        let mut initial_state: Vec<f64> = file.initial_state.to_vec();
        initial_state[4] *= DEG;
        let mut initial_cov_diag: Vec<f64> = file.initial_cov_diag.to_vec();
        initial_cov_diag[4] *= MRAD2;

        let mixture = match file.mixture {
            None => None,
            Some(m) => {
                let convert = |raw: &[[f64; 2]; 2]| {
                    vec![
                        vec![raw[0][0], raw[0][1] * MRAD],
                        vec![raw[1][0] * MRAD, raw[1][1] * MRAD2],
                    ]
                };
                if !(0.0..=1.0).contains(&m.weight_first) {
                    return Err(BenchError::Config(
                        "mixture weight must lie in [0, 1]".into(),
                    ));
                }
                let noise = MixtureNoise {
                    weight_first: m.weight_first,
                    r1: convert(&m.r1),
                    r2: convert(&m.r2),
                };
                // Both components must factorize; surface bad configs here,
                // not mid-simulation.
                guf_core::numerics::cholesky(&noise.r1_matrix()?)?;
                guf_core::numerics::cholesky(&noise.r2_matrix()?)?;
                Some(noise)
            }
        };

        Ok(Self {
            name: file.name,
            steps: file.steps,
            runs: file.runs,
            seed: file.seed,
            dt_s: file.dt_s,
            turn_rate_rad_s: file.turn_rate_deg_s * DEG,
            q1: file.q1_m2_s3,
            q2: file.q2_s3,
            q2_literal: file.q2_literal,
            sigma_r: file.sigma_r_m2,
            sigma_theta: file.sigma_theta_mrad2 * MRAD2,
            initial_state,
            initial_cov_diag,
            rules: file.rules,
            mixture,
        })
    }

    pub fn initial_state_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.initial_state)
    }

    pub fn initial_covariance(&self) -> SpdMatrix {
        SpdMatrix::from_diagonal(&self.initial_cov_diag).expect("five positive diagonal entries")
    }
}

/// Scenario files shipped with the binary.
pub fn bundled_scenario(name: &str) -> Option<&'static str> {
    match name {
        "scenario1" => Some(include_str!("../scenarios/scenario1.toml")),
        "scenario2" => Some(include_str!("../scenarios/scenario2.toml")),
        "scenario3" => Some(include_str!("../scenarios/scenario3.toml")),
        "scenario4" => Some(include_str!("../scenarios/scenario4.toml")),
        _ => None,
    }
}
