//! Coordinated-turn radar tracking benchmark for the sigma-point filter
//! library: truth simulation, range-bearing measurements (optionally
//! Gaussian-mixture corrupted), Monte Carlo RMSE reporting, and the `guf`
//! command-line tool.

pub mod cli;
pub mod error;
pub mod model;
pub mod monte_carlo;
pub mod report;
pub mod rmse;
pub mod rules;
pub mod scenario;
pub mod simulate;

pub use error::{BenchError, Result};
pub use monte_carlo::{monte_carlo, NamedRule, RmseReport};
pub use scenario::ScenarioConfig;
