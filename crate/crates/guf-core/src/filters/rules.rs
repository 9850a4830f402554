//! The pluggable sampling rules: unscented, 3rd- and 5th-degree cubature,
//! tensor-product Gauss–Hermite, and geometric unscented sampling.

use super::hermite::hermite_rule;
use crate::error::{Error, Result};
use crate::gus_sampler::{
    build_sigma_set, importance_levels, resolve_radii, AllocationPolicy, GaussianBelief,
    ImportanceLevel, LevelMode, SigmaSet,
};
use crate::numerics::SeededRandomSource;
use crate::sphere_designs::ReferenceSampling;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DVector;
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Default cap on tensor-product point counts.
pub const DEFAULT_TENSOR_CAP: usize = 1_000_000;

/// Symmetric unscented sigma points: the mean with weight κ/(κ+n) and
/// x̄ ± √(κ+n)·L_i with weight 1/(2(κ+n)).
///
/// Negative κ with κ+n > 0 is allowed; the center weight is then negative,
/// which is permitted for this rule and visible through
/// [`SigmaSet::min_weight`].
pub fn ut_points(belief: &GaussianBelief, kappa: f64) -> Result<SigmaSet> {
    let n = belief.dim();
    let scale_sq = kappa + n as f64;
    if scale_sq <= 0.0 {
        return Err(Error::ScaleDegenerate);
    }
    let l = belief.factor()?;
    let scale = scale_sq.sqrt();

    let mut points = Vec::with_capacity(2 * n + 1);
    let mut weights = Vec::with_capacity(2 * n + 1);
    points.push(belief.mean().clone());
    weights.push(kappa / scale_sq);
    let side_weight = 0.5 / scale_sq;
    for i in 0..n {
        let offset = l.column(i) * scale;
        points.push(belief.mean() + &offset);
        points.push(belief.mean() - &offset);
        weights.push(side_weight);
        weights.push(side_weight);
    }
    SigmaSet::new(points, weights)
}

/// 3rd-degree spherical-radial cubature points: x̄ ± √n·L_i, all weights
/// 1/(2n). Always positive.
pub fn ckf3_points(belief: &GaussianBelief) -> Result<SigmaSet> {
    let n = belief.dim();
    let l = belief.factor()?;
    let scale = (n as f64).sqrt();
    let weight = 0.5 / n as f64;

    let mut points = Vec::with_capacity(2 * n);
    for i in 0..n {
        let offset = l.column(i) * scale;
        points.push(belief.mean() + &offset);
        points.push(belief.mean() - &offset);
    }
    SigmaSet::new(points, vec![weight; 2 * n])
}

/// 5th-degree cubature points (2n²+1 of them): center weight 2/(n+2), axis
/// points x̄ ± √(n+2)·L_i with weight (4-n)/(2(n+2)²), and pair points
/// x̄ ± √((n+2)/2)·(L_i ± L_j) with weight 1/(n+2)².
///
/// The axis weight turns negative for n > 4; the rule still matches
/// Gaussian moments through order five.
pub fn ckf5_points(belief: &GaussianBelief) -> Result<SigmaSet> {
    let n = belief.dim();
    let nf = n as f64;
    let l = belief.factor()?;

    let center_weight = 2.0 / (nf + 2.0);
    let axis_weight = (4.0 - nf) / (2.0 * (nf + 2.0) * (nf + 2.0));
    let pair_weight = 1.0 / ((nf + 2.0) * (nf + 2.0));

    let mut points = Vec::with_capacity(2 * n * n + 1);
    let mut weights = Vec::with_capacity(2 * n * n + 1);
    points.push(belief.mean().clone());
    weights.push(center_weight);

    let axis_scale = (nf + 2.0).sqrt();
    let columns: Vec<DVector<f64>> = (0..n).map(|i| l.column(i)).collect();
    for col in &columns {
        let offset = col * axis_scale;
        points.push(belief.mean() + &offset);
        points.push(belief.mean() - &offset);
        weights.push(axis_weight);
        weights.push(axis_weight);
    }

    let pair_scale = ((nf + 2.0) / 2.0).sqrt();
    for i in 0..n {
        for j in i + 1..n {
            let plus = (&columns[i] + &columns[j]) * pair_scale;
            let minus = (&columns[i] - &columns[j]) * pair_scale;
            points.push(belief.mean() + &plus);
            points.push(belief.mean() - &plus);
            points.push(belief.mean() + &minus);
            points.push(belief.mean() - &minus);
            for _ in 0..4 {
                weights.push(pair_weight);
            }
        }
    }
    SigmaSet::new(points, weights)
}

/// Tensor-product Gauss–Hermite points: mⁿ nodes transformed by x̄ + L·u.
/// All weights positive.
pub fn gh_points(belief: &GaussianBelief, points_per_axis: usize) -> Result<SigmaSet> {
    gh_points_capped(belief, points_per_axis, DEFAULT_TENSOR_CAP)
}

/// [`gh_points`] with an explicit cap on the tensor size.
pub fn gh_points_capped(
    belief: &GaussianBelief,
    points_per_axis: usize,
    cap: usize,
) -> Result<SigmaSet> {
    if points_per_axis < 2 {
        return Err(Error::InvalidDomain("need at least two points per axis"));
    }
    let n = belief.dim();
    let mut total: usize = 1;
    for _ in 0..n {
        total = total
            .checked_mul(points_per_axis)
            .ok_or(Error::DimensionTooLarge)?;
        if total > cap {
            return Err(Error::DimensionTooLarge);
        }
    }

    let (nodes, node_weights) = hermite_rule(points_per_axis);
    let l = belief.factor()?;

    let mut points = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    let mut index = vec![0usize; n];
    loop {
        let u = DVector::from_fn(n, |i, _| nodes[index[i]]);
        let mut x = belief.mean().clone();
        x.gemv(1.0, l.matrix(), &u, 1.0);
        points.push(x);
        weights.push(index.iter().map(|&i| node_weights[i]).product());

        // Odometer increment over the multi-index.
        let mut axis = 0;
        loop {
            if axis == n {
                return SigmaSet::new(points, weights);
            }
            index[axis] += 1;
            if index[axis] < points_per_axis {
                break;
            }
            index[axis] = 0;
            axis += 1;
        }
    }
}

/// Level layout and per-level designs for the geometric unscented rule,
/// resolved once so repeated sampling only redoes the affine transform.
#[derive(Debug, Clone, PartialEq)]
pub struct GusConfig {
    levels: Vec<ImportanceLevel>,
    designs: Vec<ReferenceSampling>,
}

impl GusConfig {
    /// Explicit level values (strictly increasing, in (0,1]) with one
    /// design per level.
    pub fn new(level_values: &[f64], designs: Vec<ReferenceSampling>) -> Result<Self> {
        if designs.is_empty() || designs.len() != level_values.len() {
            return Err(Error::DimensionMismatch);
        }
        let dim = designs[0].dim();
        if designs.iter().any(|d| d.dim() != dim) {
            return Err(Error::DimensionMismatch);
        }
        let levels = resolve_radii(level_values, dim)?;
        Ok(Self { levels, designs })
    }

    /// `count` levels at d = k/(N+1), sharing one design.
    pub fn grid(count: usize, design: &ReferenceSampling) -> Result<Self> {
        let ds = importance_levels(count, LevelMode::Grid, None)?;
        Self::new(&ds, vec![design.clone(); count])
    }

    /// `count` levels at d = k/N (the closed grid reaching d = 1), sharing
    /// one design.
    pub fn grid_closed(count: usize, design: &ReferenceSampling) -> Result<Self> {
        let ds = importance_levels(count, LevelMode::GridClosed, None)?;
        Self::new(&ds, vec![design.clone(); count])
    }

    /// `count` sorted uniform random levels, drawn once here, sharing one
    /// design. The resulting rule is immutable and deterministic.
    pub fn random(
        count: usize,
        design: &ReferenceSampling,
        rng: &mut SeededRandomSource,
    ) -> Result<Self> {
        let ds = importance_levels(count, LevelMode::Random, Some(rng))?;
        Self::new(&ds, vec![design.clone(); count])
    }

    /// Grid levels with per-level designs picked from a catalogue by the
    /// allocation policy.
    pub fn allocated(
        count: usize,
        mode: LevelMode,
        catalogue: &[ReferenceSampling],
        policy: AllocationPolicy,
        rng: Option<&mut SeededRandomSource>,
    ) -> Result<Self> {
        if catalogue.is_empty() {
            return Err(Error::InvalidDomain("design catalogue is empty"));
        }
        let ds = importance_levels(count, mode, rng)?;
        let levels = resolve_radii(&ds, catalogue[0].dim())?;
        let designs = policy.assign(catalogue, &levels)?;
        Ok(Self { levels, designs })
    }

    pub fn dim(&self) -> usize {
        self.designs[0].dim()
    }

    pub fn levels(&self) -> &[ImportanceLevel] {
        &self.levels
    }

    pub fn designs(&self) -> &[ReferenceSampling] {
        &self.designs
    }

    pub fn point_count(&self) -> usize {
        self.designs.iter().map(ReferenceSampling::len).sum()
    }
}

/// Geometric unscented sigma points for a belief under a resolved config.
pub fn gus_points(belief: &GaussianBelief, config: &GusConfig) -> Result<SigmaSet> {
    build_sigma_set(belief, config.levels(), config.designs())
}

/// Which deterministic sampling rule generates the sigma points.
#[derive(Debug, Clone, PartialEq)]
pub enum SamplingScheme {
    Ut { kappa: f64 },
    Ckf3,
    Ckf5,
    GaussHermite { points_per_axis: usize },
    Gus(GusConfig),
}

/// A sampling scheme plus the measurement-update resampling policy.
///
/// With `resample` set, the measurement update regenerates points from the
/// predicted belief (the cubature-filter behavior); without it, the update
/// reuses the propagated samples (the original unscented filter).
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingRule {
    pub scheme: SamplingScheme,
    pub resample: bool,
}

impl SamplingRule {
    /// Unscented rule without resampling: the original filter behavior.
    pub fn ukf(kappa: f64) -> Self {
        Self {
            scheme: SamplingScheme::Ut { kappa },
            resample: false,
        }
    }

    /// Unscented rule with Gaussian resampling at the update.
    pub fn gukf(kappa: f64) -> Self {
        Self {
            scheme: SamplingScheme::Ut { kappa },
            resample: true,
        }
    }

    pub fn ckf3() -> Self {
        Self {
            scheme: SamplingScheme::Ckf3,
            resample: true,
        }
    }

    pub fn ckf5() -> Self {
        Self {
            scheme: SamplingScheme::Ckf5,
            resample: true,
        }
    }

    pub fn gauss_hermite(points_per_axis: usize) -> Self {
        Self {
            scheme: SamplingScheme::GaussHermite { points_per_axis },
            resample: true,
        }
    }

    pub fn gus(config: GusConfig) -> Self {
        Self {
            scheme: SamplingScheme::Gus(config),
            resample: true,
        }
    }

    pub fn with_resample(mut self, resample: bool) -> Self {
        self.resample = resample;
        self
    }

    /// Generates the rule's sigma set for a belief.
    pub fn generate(&self, belief: &GaussianBelief) -> Result<SigmaSet> {
        match &self.scheme {
            SamplingScheme::Ut { kappa } => ut_points(belief, *kappa),
            SamplingScheme::Ckf3 => ckf3_points(belief),
            SamplingScheme::Ckf5 => ckf5_points(belief),
            SamplingScheme::GaussHermite { points_per_axis } => gh_points(belief, *points_per_axis),
            SamplingScheme::Gus(config) => gus_points(belief, config),
        }
    }

    /// Number of points the rule produces in dimension `n`.
    pub fn point_count(&self, n: usize) -> usize {
        match &self.scheme {
            SamplingScheme::Ut { .. } => 2 * n + 1,
            SamplingScheme::Ckf3 => 2 * n,
            SamplingScheme::Ckf5 => 2 * n * n + 1,
            SamplingScheme::GaussHermite { points_per_axis } => points_per_axis.pow(n as u32),
            SamplingScheme::Gus(config) => config.point_count(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{self, SpdMatrix};
    use approx::assert_relative_eq;
    use nalgebra::{dvector, DVector};

    #[test]
    fn ut_scalar_example() {
        let belief = GaussianBelief::standard_normal(1);
        let set = ut_points(&belief, 2.0).unwrap();
        let root3 = 3f64.sqrt();
        assert_eq!(set.len(), 3);
        assert_relative_eq!(set.points()[0][0], 0.0);
        assert_relative_eq!(set.points()[1][0], root3, epsilon = 1e-12);
        assert_relative_eq!(set.points()[2][0], -root3, epsilon = 1e-12);
        assert_relative_eq!(set.weights()[0], 2.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(set.weights()[1], 1.0 / 6.0, epsilon = 1e-15);
        assert_relative_eq!(set.weights()[2], 1.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn ut_point_count_dimension_five() {
        let belief = GaussianBelief::standard_normal(5);
        assert_eq!(ut_points(&belief, 1.0).unwrap().len(), 11);
    }

    #[test]
    fn ut_kappa_zero_reduces_to_cubature_locations() {
        let belief = GaussianBelief::standard_normal(2);
        let ut = ut_points(&belief, 0.0).unwrap();
        let ckf = ckf3_points(&belief).unwrap();
        assert_eq!(ut.weights()[0], 0.0);
        for (a, b) in ut.points()[1..].iter().zip(ckf.points()) {
            assert_relative_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn ut_rejects_degenerate_scale() {
        let belief = GaussianBelief::standard_normal(2);
        assert_eq!(ut_points(&belief, -2.0), Err(Error::ScaleDegenerate));
        assert_eq!(ut_points(&belief, -2.5), Err(Error::ScaleDegenerate));
    }

    #[test]
    fn ckf3_standard_normal_layout() {
        let belief = GaussianBelief::standard_normal(2);
        let set = ckf3_points(&belief).unwrap();
        assert_eq!(set.len(), 4);
        let root2 = 2f64.sqrt();
        let mut norms: Vec<f64> = set.points().iter().map(DVector::norm).collect();
        norms.sort_unstable_by(f64::total_cmp);
        for norm in norms {
            assert_relative_eq!(norm, root2, epsilon = 1e-12);
        }
        assert!(set.weights().iter().all(|&w| w == 0.25));
    }

    #[test]
    fn ckf3_covariance_is_exact() {
        let mut rng = numerics::SeededRandomSource::new(5, 0);
        let p = numerics::random_spd(4, 0.3, &mut rng);
        let mean = numerics::random_vector(4, &mut rng);
        let belief = GaussianBelief::new(mean.clone(), p.clone()).unwrap();
        let set = ckf3_points(&belief).unwrap();
        let cov = set.weighted_covariance_about(&mean);
        assert!(numerics::relative_frobenius(&cov, p.as_matrix()) < 1e-13);
    }

    #[test]
    fn ckf5_counts_and_negative_axis_weight() {
        let belief = GaussianBelief::standard_normal(5);
        let set = ckf5_points(&belief).unwrap();
        assert_eq!(set.len(), 51);
        assert_relative_eq!(set.weights()[1], -1.0 / 98.0, epsilon = 1e-15);
        assert_relative_eq!(set.weight_sum(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ckf5_scalar_case() {
        let belief = GaussianBelief::standard_normal(1);
        let set = ckf5_points(&belief).unwrap();
        assert_eq!(set.len(), 3);
        let root3 = 3f64.sqrt();
        assert_relative_eq!(set.points()[0][0], 0.0);
        assert_relative_eq!(set.points()[1][0], root3, epsilon = 1e-12);
        assert_relative_eq!(set.points()[2][0], -root3, epsilon = 1e-12);
        assert_relative_eq!(set.weights()[0], 2.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(set.weights()[1], 1.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn ckf5_cross_moment_two_dims() {
        let belief = GaussianBelief::standard_normal(2);
        let set = ckf5_points(&belief).unwrap();
        assert_relative_eq!(set.weight_sum(), 1.0, epsilon = 1e-14);
        let cross: f64 = set
            .points()
            .iter()
            .zip(set.weights())
            .map(|(x, w)| w * x[0] * x[0] * x[1] * x[1])
            .sum();
        assert_relative_eq!(cross, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn gh_tensor_counts() {
        let belief = GaussianBelief::standard_normal(5);
        assert_eq!(gh_points(&belief, 3).unwrap().len(), 243);
    }

    #[test]
    fn gh_scalar_nodes() {
        let belief = GaussianBelief::standard_normal(1);
        let set = gh_points(&belief, 3).unwrap();
        let mut pairs: Vec<(f64, f64)> = set
            .points()
            .iter()
            .zip(set.weights())
            .map(|(x, &w)| (x[0], w))
            .collect();
        pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let root3 = 3f64.sqrt();
        assert_relative_eq!(pairs[0].0, -root3, epsilon = 1e-10);
        assert_relative_eq!(pairs[1].0, 0.0, epsilon = 1e-10);
        assert_relative_eq!(pairs[2].0, root3, epsilon = 1e-10);
        assert_relative_eq!(pairs[0].1, 1.0 / 6.0, epsilon = 1e-12);
        assert_relative_eq!(pairs[1].1, 2.0 / 3.0, epsilon = 1e-12);

        let two = gh_points(&belief, 2).unwrap();
        let mut nodes: Vec<f64> = two.points().iter().map(|x| x[0]).collect();
        nodes.sort_unstable_by(f64::total_cmp);
        assert_relative_eq!(nodes[0], -1.0, epsilon = 1e-12);
        assert_relative_eq!(nodes[1], 1.0, epsilon = 1e-12);
        assert!(two.weights().iter().all(|&w| (w - 0.5).abs() < 1e-12));
    }

    #[test]
    fn gh_cap_is_enforced() {
        let belief = GaussianBelief::standard_normal(7);
        assert_eq!(gh_points(&belief, 10), Err(Error::DimensionTooLarge));
        assert!(gh_points_capped(&belief, 3, 3000).is_ok());
        assert_eq!(
            gh_points_capped(&belief, 3, 2000),
            Err(Error::DimensionTooLarge)
        );
    }

    #[test]
    fn gus_scenario_point_counts() {
        let belief5 = GaussianBelief::standard_normal(5);
        let axes = ReferenceSampling::axes(5);

        let guf1 = GusConfig::grid(1, &axes).unwrap();
        assert_eq!(gus_points(&belief5, &guf1).unwrap().len(), 10);

        let guf_scenario3 = GusConfig::grid(2, &axes).unwrap();
        assert_eq!(gus_points(&belief5, &guf_scenario3).unwrap().len(), 20);

        let guf4 = GusConfig::grid(9, &ReferenceSampling::cumulative_ones(5, 4).unwrap()).unwrap();
        assert_eq!(gus_points(&belief5, &guf4).unwrap().len(), 1890);
    }

    #[test]
    fn rule_point_counts_match_generation() {
        let belief = GaussianBelief::standard_normal(3);
        let rules = [
            SamplingRule::gukf(1.0),
            SamplingRule::ckf3(),
            SamplingRule::ckf5(),
            SamplingRule::gauss_hermite(3),
            SamplingRule::gus(GusConfig::grid(2, &ReferenceSampling::axes(3)).unwrap()),
        ];
        for rule in rules {
            let set = rule.generate(&belief).unwrap();
            assert_eq!(set.len(), rule.point_count(3));
            assert_relative_eq!(set.weight_sum(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rules_reproduce_first_two_moments() {
        let mut rng = numerics::SeededRandomSource::new(9, 0);
        let p = numerics::random_spd(3, 0.5, &mut rng);
        let mean = dvector![1.0, -2.0, 0.5];
        let belief = GaussianBelief::new(mean.clone(), p.clone()).unwrap();
        let rules = [
            SamplingRule::gukf(1.0),
            SamplingRule::ukf(-1.0),
            SamplingRule::ckf3(),
            SamplingRule::ckf5(),
            SamplingRule::gauss_hermite(4),
            SamplingRule::gus(GusConfig::grid(3, &ReferenceSampling::axes(3)).unwrap()),
        ];
        for rule in rules {
            let set = rule.generate(&belief).unwrap();
            assert_relative_eq!(set.weighted_mean(), mean, epsilon = 1e-10);
            let cov = set.weighted_covariance_about(&mean);
            assert!(
                numerics::relative_frobenius(&cov, p.as_matrix()) < 1e-8,
                "covariance mismatch for {:?}",
                rule.scheme
            );
        }
    }

    #[test]
    fn positivity_ledger() {
        let belief3 = GaussianBelief::standard_normal(3);
        let belief5 = GaussianBelief::standard_normal(5);
        // 5th-degree axis weights: positive at n = 3, negative at n = 5.
        assert!(ckf5_points(&belief3).unwrap().min_weight() > 0.0);
        assert!(ckf5_points(&belief5).unwrap().min_weight() < 0.0);
        // The always-positive rules.
        assert!(ckf3_points(&belief5).unwrap().min_weight() > 0.0);
        assert!(gh_points(&belief5, 3).unwrap().min_weight() > 0.0);
        let gus = gus_points(
            &belief5,
            &GusConfig::grid(3, &ReferenceSampling::cumulative_ones(5, 2).unwrap()).unwrap(),
        )
        .unwrap();
        assert!(gus.min_weight() > 0.0);
        // Positive-kappa unscented points are positive too.
        assert!(ut_points(&belief5, 1.0).unwrap().min_weight() > 0.0);
    }

    #[test]
    fn gus_config_rejects_mixed_dimensions() {
        let designs = vec![ReferenceSampling::axes(2), ReferenceSampling::axes(3)];
        assert!(GusConfig::new(&[0.3, 0.7], designs).is_err());
    }

    #[test]
    fn third_degree_fourth_moment_limitation() {
        // E[x⁴] under the 3rd-degree rule is n, not 3.
        let belief = GaussianBelief::standard_normal(5);
        let set = ckf3_points(&belief).unwrap();
        let fourth: f64 = set
            .points()
            .iter()
            .zip(set.weights())
            .map(|(x, w)| w * x[0].powi(4))
            .sum();
        assert_relative_eq!(fourth, 5.0, epsilon = 1e-12);
    }

    #[test]
    fn spd_belief_required() {
        let cov = SpdMatrix::new(nalgebra::DMatrix::from_row_slice(
            2,
            2,
            &[1.0, 2.0, 2.0, 1.0],
        ))
        .unwrap();
        let belief = GaussianBelief::new(DVector::zeros(2), cov).unwrap();
        assert_eq!(ckf3_points(&belief), Err(Error::NotPositiveDefinite));
    }
}
