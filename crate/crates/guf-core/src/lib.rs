//! Sigma-point construction and Gaussian filtering built around geometric
//! unscented sampling: moment-matched, positively weighted point sets drawn
//! from uniformly geometric distributions on spheres, plus the classical
//! unscented, cubature and Gauss–Hermite rules and the shared filter loop
//! they all plug into.
//!
//! The crate is `no_std`-compatible (`alloc` required); disable default
//! features to drop `std`.
//!
//! ```
//! use guf_core::filters::{GusConfig, SamplingRule};
//! use guf_core::gus_sampler::GaussianBelief;
//! use guf_core::sphere_designs::ReferenceSampling;
//!
//! # fn main() -> guf_core::Result<()> {
//! let belief = GaussianBelief::standard_normal(5);
//! let design = ReferenceSampling::cumulative_ones(5, 2)?;
//! let rule = SamplingRule::gus(GusConfig::grid(2, &design)?);
//! let set = rule.generate(&belief)?;
//! assert_eq!(set.len(), 100);
//! assert!(set.min_weight() > 0.0);
//! # Ok(())
//! # }
//! ```

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod filters;
pub mod gus_sampler;
pub mod numerics;
pub mod sphere_designs;

pub use error::{Error, Result};
pub use gus_sampler::{GaussianBelief, SigmaSet};
pub use numerics::{SeededRandomSource, SpdMatrix};
