//! Geometric unscented sampling: builds a moment-matched, positively
//! weighted sigma set for a Gaussian belief from importance levels d_k,
//! their radial values r_k, and unit-sphere reference samplings.
//!
//! The construction places points on ellipsoidal shells of squared
//! Mahalanobis radius r_k + β, weights them proportionally to the density
//! value exp(-r_k/2) on the original shells, and solves the scalar β so
//! that the weighted covariance reproduces the belief covariance exactly.

use crate::error::{Error, Result};
use crate::numerics::{
    self, chi_square_survival, chi_square_upper_quantile, cholesky, LowerTriangularFactor,
    SeededRandomSource, SpdMatrix,
};
use crate::sphere_designs::ReferenceSampling;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// A Gaussian state estimate: mean vector and SPD covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianBelief {
    mean: DVector<f64>,
    covariance: SpdMatrix,
}

impl GaussianBelief {
    pub fn new(mean: DVector<f64>, covariance: SpdMatrix) -> Result<Self> {
        if mean.len() != covariance.dim() {
            return Err(Error::DimensionMismatch);
        }
        Ok(Self { mean, covariance })
    }

    pub fn standard_normal(n: usize) -> Self {
        Self {
            mean: DVector::zeros(n),
            covariance: SpdMatrix::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &SpdMatrix {
        &self.covariance
    }

    pub fn factor(&self) -> Result<LowerTriangularFactor> {
        cholesky(&self.covariance)
    }

    /// Density normalizer λ = (2π)^{-n/2} |P|^{-1/2}.
    pub fn density_normalizer(&self) -> Result<f64> {
        let l = self.factor()?;
        let n = self.dim() as f64;
        Ok((2.0 * core::f64::consts::PI).powf(-0.5 * n) / l.sqrt_determinant())
    }
}

/// Squared Mahalanobis distance (x - x̄)ᵀ P⁻¹ (x - x̄), evaluated through
/// the Cholesky factor rather than an explicit inverse.
pub fn mahalanobis(belief: &GaussianBelief, x: &DVector<f64>) -> Result<f64> {
    if x.len() != belief.dim() {
        return Err(Error::DimensionMismatch);
    }
    let l = belief.factor()?;
    let u = l.forward_solve(&(x - belief.mean()));
    Ok(u.norm_squared())
}

/// Importance value i(x): the probability mass at or beyond x's shell.
/// Maximal (= 1) at the mean.
pub fn importance_value(belief: &GaussianBelief, x: &DVector<f64>) -> Result<f64> {
    Ok(chi_square_survival(belief.dim(), mahalanobis(belief, x)?))
}

/// Importance carried by the region between two level values.
pub fn region_importance(d1: f64, d2: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&d1) || !(0.0..=1.0).contains(&d2) {
        return Err(Error::InvalidDomain("level values must lie in [0, 1]"));
    }
    if d1 > d2 {
        return Err(Error::OrderViolation);
    }
    Ok(d2 - d1)
}

/// How the level values d_k are laid out in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelMode {
    /// d_k = k/(N+1): uniform interior points, the tracking-benchmark choice.
    Grid,
    /// d_k = k/N: includes the d = 1 shell that collapses onto the mean
    /// before stretching.
    GridClosed,
    /// Sorted uniform draws, duplicates redrawn.
    Random,
}

/// Generates N strictly increasing level values in (0, 1].
pub fn importance_levels(
    count: usize,
    mode: LevelMode,
    rng: Option<&mut SeededRandomSource>,
) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidDomain("level count must be positive"));
    }
    match mode {
        LevelMode::Grid => Ok((1..=count)
            .map(|k| k as f64 / (count as f64 + 1.0))
            .collect()),
        LevelMode::GridClosed => Ok((1..=count).map(|k| k as f64 / count as f64).collect()),
        LevelMode::Random => {
            let rng = rng.ok_or(Error::InvalidDomain("random level mode needs an rng"))?;
            let mut ds: Vec<f64> = Vec::with_capacity(count);
            while ds.len() < count {
                let d = rng.next_uniform();
                if d > 0.0 && !ds.contains(&d) {
                    ds.push(d);
                }
            }
            ds.sort_unstable_by(f64::total_cmp);
            Ok(ds)
        }
    }
}

/// A resolved importance level: value d and the squared Mahalanobis radius
/// r of the shell carrying tail mass d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImportanceLevel {
    d: f64,
    r: f64,
}

impl ImportanceLevel {
    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Density value on the pre-stretch shell: λ · exp(-r/2).
    pub fn basic_weight(&self, normalizer: f64) -> f64 {
        normalizer * (-0.5 * self.r).exp()
    }
}

/// Fills in the radial value of every level by inverting the chi-square
/// tail for the given dimension.
pub fn resolve_radii(level_values: &[f64], dim: usize) -> Result<Vec<ImportanceLevel>> {
    if level_values.is_empty() {
        return Err(Error::InvalidDomain("need at least one level"));
    }
    for pair in level_values.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::OrderViolation);
        }
    }
    level_values
        .iter()
        .map(|&d| {
            if !(d > 0.0 && d <= 1.0) {
                return Err(Error::InvalidDomain("level values must lie in (0, 1]"));
            }
            Ok(ImportanceLevel {
                d,
                r: chi_square_upper_quantile(dim, d)?,
            })
        })
        .collect()
}

/// How many points each level should receive, relative to the others.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AllocationPolicy {
    /// Identical point-count targets per level.
    Equal,
    /// Targets proportional to the shell density exp(-r_k/2).
    DensityProportional,
}

impl AllocationPolicy {
    /// Picks one catalogue design per level whose size best approximates
    /// the policy's target ratio, normalized so the heaviest level aims at
    /// the largest available design.
    pub fn assign(
        &self,
        catalogue: &[ReferenceSampling],
        levels: &[ImportanceLevel],
    ) -> Result<Vec<ReferenceSampling>> {
        if catalogue.is_empty() {
            return Err(Error::InvalidDomain("design catalogue is empty"));
        }
        let largest = catalogue
            .iter()
            .map(ReferenceSampling::len)
            .max()
            .expect("nonempty catalogue");
        let max_density = levels
            .iter()
            .map(|l| (-0.5 * l.r()).exp())
            .fold(0.0, f64::max);
        Ok(levels
            .iter()
            .map(|level| {
                let ratio = match self {
                    AllocationPolicy::Equal => 1.0,
                    AllocationPolicy::DensityProportional => (-0.5 * level.r()).exp() / max_density,
                };
                let target = ratio * largest as f64;
                catalogue
                    .iter()
                    .min_by(|a, b| {
                        (a.len() as f64 - target)
                            .abs()
                            .total_cmp(&(b.len() as f64 - target).abs())
                    })
                    .expect("nonempty catalogue")
                    .clone()
            })
            .collect())
    }
}

/// Per-level metadata attached to sigma sets produced by the geometric
/// unscented construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GusMeta {
    pub levels: Vec<ImportanceLevel>,
    /// Level index of each point, parallel to the point list.
    pub level_of: Vec<usize>,
    /// The stretch scalar β solving the covariance-match equation.
    pub stretch: f64,
}

/// A weighted deterministic sample set approximating a belief.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSet {
    points: Vec<DVector<f64>>,
    weights: Vec<f64>,
    gus: Option<GusMeta>,
}

impl SigmaSet {
    pub fn new(points: Vec<DVector<f64>>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::DimensionMismatch);
        }
        Ok(Self {
            points,
            weights,
            gus: None,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Level/stretch metadata; present only for geometric unscented sets.
    pub fn gus_meta(&self) -> Option<&GusMeta> {
        self.gus.as_ref()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn weighted_mean(&self) -> DVector<f64> {
        numerics::weighted_mean(&self.points, &self.weights)
    }

    pub fn weighted_covariance_about(&self, center: &DVector<f64>) -> DMatrix<f64> {
        numerics::weighted_covariance(&self.points, &self.weights, center)
    }

    pub fn weighted_covariance(&self) -> DMatrix<f64> {
        self.weighted_covariance_about(&self.weighted_mean())
    }
}

/// Builds the final moment-matched sigma set.
///
/// Per-point weights at level k are
/// `w_k = exp(-r_k/2) / Σ_m N_m exp(-r_m/2)` with N_m the design sizes, the
/// stretch is `β = (1 - Σ w_k r_k c_k) / (Σ w_k c_k)`, and the points are
/// `x̄ + √(r_k + β) · L · S_j` over every design point S_j.
pub fn build_sigma_set(
    belief: &GaussianBelief,
    levels: &[ImportanceLevel],
    designs: &[ReferenceSampling],
) -> Result<SigmaSet> {
    let (weights_by_level, stretch) = level_weights_and_stretch(levels, designs)?;
    for level in levels {
        if level.r() + stretch < 0.0 {
            return Err(Error::NegativeStretchRadius);
        }
    }
    check_design_dims(belief, designs)?;
    let l = belief.factor()?;

    let total: usize = designs.iter().map(ReferenceSampling::len).sum();
    let mut points = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    let mut level_of = Vec::with_capacity(total);
    for (k, (level, design)) in levels.iter().zip(designs).enumerate() {
        let scale = (level.r() + stretch).sqrt();
        for s in design.points() {
            let mut x = belief.mean().clone();
            x.gemv(scale, l.matrix(), s, 1.0);
            points.push(x);
            weights.push(weights_by_level[k]);
            level_of.push(k);
        }
    }

    Ok(SigmaSet {
        points,
        weights,
        gus: Some(GusMeta {
            levels: levels.to_vec(),
            level_of,
            stretch,
        }),
    })
}

/// The pre-stretch "basic" samples x̄ + √r_k · L · S_j. At r = 0 the whole
/// level collapses onto the mean.
pub fn basic_points(
    belief: &GaussianBelief,
    levels: &[ImportanceLevel],
    designs: &[ReferenceSampling],
) -> Result<Vec<DVector<f64>>> {
    if levels.is_empty() || levels.len() != designs.len() {
        return Err(Error::DimensionMismatch);
    }
    check_design_dims(belief, designs)?;
    let l = belief.factor()?;
    let mut points = Vec::new();
    for (level, design) in levels.iter().zip(designs) {
        let scale = level.r().sqrt();
        for s in design.points() {
            let mut x = belief.mean().clone();
            x.gemv(scale, l.matrix(), s, 1.0);
            points.push(x);
        }
    }
    Ok(points)
}

/// Weighted expectation Σ ω_kj f(X_kj) of a vector-valued function over
/// the sigma set.
pub fn approximate_expectation(
    set: &SigmaSet,
    mut f: impl FnMut(&DVector<f64>) -> DVector<f64>,
) -> DVector<f64> {
    let mut acc: Option<DVector<f64>> = None;
    for (x, &w) in set.points().iter().zip(set.weights()) {
        let fx = f(x);
        match &mut acc {
            Some(sum) => sum.axpy(w, &fx, 1.0),
            None => acc = Some(fx * w),
        }
    }
    acc.expect("sigma sets are nonempty")
}

fn check_design_dims(belief: &GaussianBelief, designs: &[ReferenceSampling]) -> Result<()> {
    if designs
        .iter()
        .any(|d| d.dim() != belief.dim() || d.is_empty())
    {
        return Err(Error::DimensionMismatch);
    }
    Ok(())
}

/// Shared weight/stretch solve: returns the per-point weight of each level
/// and β from the covariance-matching equation
/// `Σ_k w_k (r_k + β) c_k = 1`.
fn level_weights_and_stretch(
    levels: &[ImportanceLevel],
    designs: &[ReferenceSampling],
) -> Result<(Vec<f64>, f64)> {
    if levels.is_empty() || levels.len() != designs.len() {
        return Err(Error::DimensionMismatch);
    }
    let density: Vec<f64> = levels.iter().map(|l| (-0.5 * l.r()).exp()).collect();
    let denom: f64 = density
        .iter()
        .zip(designs)
        .map(|(e, d)| d.len() as f64 * e)
        .sum();
    if denom <= 0.0 {
        return Err(Error::InvalidDomain("degenerate weight normalization"));
    }
    let weights_by_level: Vec<f64> = density.iter().map(|e| e / denom).collect();

    let mut coeff = 0.0;
    let mut radial = 0.0;
    for ((w, level), design) in weights_by_level.iter().zip(levels).zip(designs) {
        coeff += w * design.c_value();
        radial += w * level.r() * design.c_value();
    }
    let stretch = (1.0 - radial) / coeff;
    Ok((weights_by_level, stretch))
}
