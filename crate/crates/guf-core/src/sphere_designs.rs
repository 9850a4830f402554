//! Uniformly geometric distributions on the unit sphere: canonical orbit
//! generators, orbit expansion under coordinate permutations and sign
//! changes, and the closed-form coefficient H_n relating an orbit's
//! outer-product sum to the identity.

use crate::error::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Relative tolerance deciding whether two coordinates belong to the same
/// multiplicity run. Generators are constructed, not measured, so this only
/// absorbs rounding from normalization.
const RUN_TOL: f64 = 1e-12;

/// Canonical representative of an orbit under coordinate permutations and
/// sign changes: coordinates nonnegative, sorted nonincreasing, unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    coords: Vec<f64>,
    multiplicities: Vec<usize>,
    nonzero_count: usize,
}

impl Generator {
    /// Canonicalizes an arbitrary nonzero vector: absolute values sorted
    /// nonincreasing and scaled to unit Euclidean length, with multiplicity
    /// runs snapped to a common value.
    pub fn canonicalize(v: &[f64]) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::DimensionMismatch);
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidDomain("generator coordinates must be finite"));
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let mut coords: Vec<f64> = v.iter().map(|x| x.abs() / norm).collect();
        coords.sort_unstable_by(|a, b| b.total_cmp(a));

        // Group into runs of equal coordinates, snapping run members to the
        // leading value so later orbit expansion can compare exactly.
        let mut multiplicities = Vec::new();
        let mut start = 0;
        for i in 1..=coords.len() {
            let head = coords[start];
            let same =
                i < coords.len() && (head - coords[i]).abs() <= RUN_TOL * head.max(coords[i]);
            if !same {
                for c in coords.iter_mut().take(i).skip(start) {
                    *c = head;
                }
                multiplicities.push(i - start);
                start = i;
            }
        }
        let nonzero_count = coords.iter().filter(|&&c| c > 0.0).count();
        Ok(Self {
            coords,
            multiplicities,
            nonzero_count,
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Run lengths (a_1, …, a_M) of equal coordinates.
    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// Boundary indices t_i = a_1 + … + a_i.
    pub fn boundary_indices(&self) -> Vec<usize> {
        let mut acc = 0;
        self.multiplicities
            .iter()
            .map(|a| {
                acc += a;
                acc
            })
            .collect()
    }

    /// Count of strictly positive coordinates, N(x).
    pub fn nonzero_count(&self) -> usize {
        self.nonzero_count
    }

    /// Orbit cardinality 2^{N(x)} · n! / ∏ a_j!.
    pub fn orbit_size(&self) -> usize {
        let mut size: u128 = 1u128 << self.nonzero_count;
        let mut placed = 0usize;
        // Multinomial as a product of binomials to stay integral throughout.
        for &a in &self.multiplicities {
            for i in 1..=a {
                size = size * (placed + i) as u128 / i as u128;
            }
            placed += a;
        }
        usize::try_from(size).expect("orbit size fits in usize")
    }

    /// Closed-form coefficient H_n with
    /// Σ_{y ∈ orbit} y·yᵀ = H_n · I_n.
    pub fn h_coefficient(&self) -> f64 {
        // 2^{N(x)} (n-1)!/∏ a_j! equals orbit_size / n, kept integral as
        // long as possible.
        let factor = self.orbit_size() as f64 / self.dim() as f64;
        let mut weighted_square_sum = 0.0;
        let mut idx = 0;
        for &a in &self.multiplicities {
            let v = self.coords[idx];
            weighted_square_sum += a as f64 * v * v;
            idx += a;
        }
        factor * weighted_square_sum
    }

    /// All distinct images of the generator under coordinate permutations
    /// and sign changes. Each image is produced exactly once, so the result
    /// length equals [`Self::orbit_size`] without deduplication.
    pub fn expand_orbit(&self) -> Vec<DVector<f64>> {
        let n = self.dim();
        let mut groups: Vec<(f64, usize)> = Vec::with_capacity(self.multiplicities.len());
        let mut idx = 0;
        for &a in &self.multiplicities {
            groups.push((self.coords[idx], a));
            idx += a;
        }

        let mut permutations = Vec::new();
        let mut current = vec![0.0; n];
        fill_permutations(&mut groups, &mut current, 0, &mut permutations);

        let mut orbit = Vec::with_capacity(self.orbit_size());
        for perm in &permutations {
            append_sign_images(perm, &mut orbit);
        }
        orbit
    }
}

/// Recursively places one value group per position, yielding each distinct
/// permutation of the multiset exactly once.
fn fill_permutations(
    groups: &mut Vec<(f64, usize)>,
    current: &mut Vec<f64>,
    pos: usize,
    out: &mut Vec<Vec<f64>>,
) {
    if pos == current.len() {
        out.push(current.clone());
        return;
    }
    for g in 0..groups.len() {
        if groups[g].1 == 0 {
            continue;
        }
        groups[g].1 -= 1;
        current[pos] = groups[g].0;
        fill_permutations(groups, current, pos + 1, out);
        groups[g].1 += 1;
    }
}

/// Appends the 2^{N(v)} distinct sign images of `v` (flipping zero entries
/// is the identity, so only nonzero positions toggle).
fn append_sign_images(v: &[f64], out: &mut Vec<DVector<f64>>) {
    let nonzero: Vec<usize> = (0..v.len()).filter(|&i| v[i] != 0.0).collect();
    for mask in 0u64..(1u64 << nonzero.len()) {
        let mut image = DVector::from_column_slice(v);
        for (bit, &i) in nonzero.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                image[i] = -image[i];
            }
        }
        out.push(image);
    }
}

/// All distinct sign-change images of an arbitrary vector (the Θⁿ orbit).
pub fn sign_change_orbit(v: &[f64]) -> Vec<DVector<f64>> {
    let mut out = Vec::new();
    append_sign_images(v, &mut out);
    out
}

/// Exact Σ y·yᵀ over a point set, accumulated with Neumaier compensation so
/// it can serve as a tight oracle for [`Generator::h_coefficient`].
pub fn sum_outer_products(points: &[DVector<f64>]) -> DMatrix<f64> {
    assert!(!points.is_empty(), "need at least one point");
    let n = points[0].len();
    let mut sum = DMatrix::<f64>::zeros(n, n);
    let mut compensation = DMatrix::<f64>::zeros(n, n);
    for p in points {
        for i in 0..n {
            for j in 0..n {
                let term = p[i] * p[j];
                let s = sum[(i, j)] + term;
                if sum[(i, j)].abs() >= term.abs() {
                    compensation[(i, j)] += (sum[(i, j)] - s) + term;
                } else {
                    compensation[(i, j)] += (term - s) + sum[(i, j)];
                }
                sum[(i, j)] = s;
            }
        }
    }
    sum + compensation
}

/// Distance from each point to its nearest distinct neighbor.
pub fn nearest_neighbor_distances(points: &[DVector<f64>]) -> Vec<f64> {
    assert!(points.len() >= 2, "need at least two points");
    points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            points
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, q)| (p - q).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Smallest nearest-neighbor distance in the set. A single-orbit sampling
/// is uniformly geometric when every entry of
/// [`nearest_neighbor_distances`] equals this value.
pub fn min_separation(points: &[DVector<f64>]) -> f64 {
    nearest_neighbor_distances(points)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// A reference sampling: the union of one or more disjoint generator
/// orbits, closed under permutations and sign changes, together with its
/// covariance coefficient c = Σ H_n over the basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSampling {
    basis: Vec<Generator>,
    points: Vec<DVector<f64>>,
    c_value: f64,
}

impl ReferenceSampling {
    /// Builds from raw basis vectors, canonicalizing each and rejecting
    /// generators that share an orbit.
    pub fn from_generators(vectors: &[&[f64]]) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::InvalidDomain("reference sampling needs a basis"));
        }
        let basis: Vec<Generator> = vectors
            .iter()
            .map(|v| Generator::canonicalize(v))
            .collect::<Result<_>>()?;
        Self::from_basis(basis)
    }

    pub fn from_basis(basis: Vec<Generator>) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::InvalidDomain("reference sampling needs a basis"));
        }
        let n = basis[0].dim();
        if basis.iter().any(|g| g.dim() != n) {
            return Err(Error::DimensionMismatch);
        }
        for i in 0..basis.len() {
            for j in 0..i {
                if same_orbit(&basis[i], &basis[j]) {
                    return Err(Error::InvalidDomain("basis orbits must be disjoint"));
                }
            }
        }
        let mut points = Vec::new();
        let mut c_value = 0.0;
        for g in &basis {
            points.extend(g.expand_orbit());
            c_value += g.h_coefficient();
        }
        Ok(Self {
            basis,
            points,
            c_value,
        })
    }

    /// Orbit of the first axis vector: the 2n points ±e_i.
    pub fn axes(n: usize) -> Self {
        let mut e1 = vec![0.0; n];
        e1[0] = 1.0;
        Self::from_generators(&[&e1]).expect("axis generator is valid")
    }

    /// Orbit of the normalized k-ones generator (1,…,1,0,…,0)/√k.
    pub fn ones_orbit(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidDomain("ones count must satisfy 1 <= k <= n"));
        }
        let mut v = vec![0.0; n];
        for x in v.iter_mut().take(k) {
            *x = 1.0;
        }
        Self::from_generators(&[&v])
    }

    /// Cumulative union of the ones orbits for k = 1..=grade; the graded
    /// family used by the tracking scenarios (sizes 10/50/130/210 in five
    /// dimensions).
    pub fn cumulative_ones(n: usize, grade: usize) -> Result<Self> {
        if grade == 0 || grade > n {
            return Err(Error::InvalidDomain("grade must satisfy 1 <= grade <= n"));
        }
        let mut basis = Vec::with_capacity(grade);
        for k in 1..=grade {
            let mut v = vec![0.0; n];
            for x in v.iter_mut().take(k) {
                *x = 1.0;
            }
            basis.push(Generator::canonicalize(&v)?);
        }
        Self::from_basis(basis)
    }

    pub fn dim(&self) -> usize {
        self.basis[0].dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn basis(&self) -> &[Generator] {
        &self.basis
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }

    /// c = Σ H_n over the basis; Σ y·yᵀ over all points equals c·I.
    pub fn c_value(&self) -> f64 {
        self.c_value
    }
}

fn same_orbit(a: &Generator, b: &Generator) -> bool {
    a.dim() == b.dim()
        && a.coords()
            .iter()
            .zip(b.coords())
            .all(|(x, y)| (x - y).abs() <= RUN_TOL * x.abs().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const SQRT_2_INV: f64 = core::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn canonicalize_axis() {
        let g = Generator::canonicalize(&[0.0, -1.0]).unwrap();
        assert_eq!(g.coords(), &[1.0, 0.0]);
        assert_eq!(g.multiplicities(), &[1, 1]);
        assert_eq!(g.nonzero_count(), 1);
    }

    #[test]
    fn canonicalize_two_ones() {
        let g = Generator::canonicalize(&[1.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        for &c in &g.coords()[..2] {
            assert_relative_eq!(c, SQRT_2_INV, epsilon = 1e-15);
        }
        assert_eq!(&g.coords()[2..], &[0.0, 0.0, 0.0]);
        assert_eq!(g.multiplicities(), &[2, 3]);
        assert_eq!(g.nonzero_count(), 2);
        assert_eq!(g.boundary_indices(), &[2, 5]);
    }

    #[test]
    fn canonicalize_sorts_and_normalizes() {
        let g = Generator::canonicalize(&[3.0, 4.0]).unwrap();
        assert_relative_eq!(g.coords()[0], 0.8, epsilon = 1e-15);
        assert_relative_eq!(g.coords()[1], 0.6, epsilon = 1e-15);
        assert_eq!(g.multiplicities(), &[1, 1]);
        assert_eq!(g.nonzero_count(), 2);
    }

    #[test]
    fn canonicalize_rejects_zero() {
        assert_eq!(Generator::canonicalize(&[0.0, 0.0]), Err(Error::ZeroVector));
    }

    #[test]
    fn orbit_sizes() {
        let e1 = Generator::canonicalize(&[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(e1.orbit_size(), 10);
        let two = Generator::canonicalize(&[1.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(two.orbit_size(), 40);
        let scalar = Generator::canonicalize(&[1.0]).unwrap();
        assert_eq!(scalar.orbit_size(), 2);
    }

    #[test]
    fn orbit_enumeration_matches_size() {
        for coords in [
            &[1.0, 0.0, 0.0, 0.0, 0.0][..],
            &[1.0, 1.0, 0.0, 0.0, 0.0],
            &[1.0, 1.0, 1.0, 0.0, 0.0],
            &[1.0, 1.0, 1.0, 1.0, 0.0],
            &[3.0, 2.0, 1.0],
        ] {
            let g = Generator::canonicalize(coords).unwrap();
            let orbit = g.expand_orbit();
            assert_eq!(orbit.len(), g.orbit_size());
            for p in &orbit {
                assert_relative_eq!(p.norm(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn axis_orbit_in_two_dims() {
        let g = Generator::canonicalize(&[1.0, 0.0]).unwrap();
        let mut orbit: Vec<(i64, i64)> = g
            .expand_orbit()
            .iter()
            .map(|p| (p[0] as i64, p[1] as i64))
            .collect();
        orbit.sort_unstable();
        assert_eq!(orbit, vec![(-1, 0), (0, -1), (0, 1), (1, 0)]);
    }

    #[test]
    fn diagonal_orbit_in_two_dims() {
        let g = Generator::canonicalize(&[1.0, 1.0]).unwrap();
        let orbit = g.expand_orbit();
        assert_eq!(orbit.len(), 4);
        for p in &orbit {
            assert_relative_eq!(p[0].abs(), SQRT_2_INV, epsilon = 1e-15);
            assert_relative_eq!(p[1].abs(), SQRT_2_INV, epsilon = 1e-15);
        }
    }

    #[test]
    fn h_coefficient_examples() {
        let e1 = Generator::canonicalize(&[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(e1.h_coefficient(), 2.0, epsilon = 1e-13);
        let diag = Generator::canonicalize(&[1.0, 1.0]).unwrap();
        assert_relative_eq!(diag.h_coefficient(), 2.0, epsilon = 1e-13);
        let tilted = Generator::canonicalize(&[3f64.sqrt() / 2.0, 0.5]).unwrap();
        assert_relative_eq!(tilted.h_coefficient(), 4.0, epsilon = 1e-13);
    }

    #[test]
    fn h_coefficient_matches_brute_force() {
        for coords in [
            &[1.0, 0.0, 0.0, 0.0, 0.0][..],
            &[1.0, 1.0],
            &[3f64.sqrt() / 2.0, 0.5],
            &[1.0, 1.0, 1.0, 0.0, 0.0],
            &[0.9, 0.3, 0.3, 0.1],
        ] {
            let g = Generator::canonicalize(coords).unwrap();
            let sum = sum_outer_products(&g.expand_orbit());
            let expected = DMatrix::identity(g.dim(), g.dim()) * g.h_coefficient();
            let max_diff = (sum - expected).abs().max();
            assert!(max_diff <= 1e-12, "max deviation {max_diff}");
        }
    }

    #[test]
    fn sign_orbit_of_dense_vector() {
        // Two nonzero coordinates: Σ y·yᵀ = 4·diag(x₁², x₂²).
        let orbit = sign_change_orbit(&[0.3, -0.7]);
        assert_eq!(orbit.len(), 4);
        let sum = sum_outer_products(&orbit);
        assert_relative_eq!(sum[(0, 0)], 4.0 * 0.09, epsilon = 1e-14);
        assert_relative_eq!(sum[(1, 1)], 4.0 * 0.49, epsilon = 1e-14);
        assert_relative_eq!(sum[(0, 1)], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn sign_orbit_with_zero_entry() {
        // One zero coordinate halves the orbit: coefficient 2^{N} with N = 1.
        let orbit = sign_change_orbit(&[0.5, 0.0]);
        assert_eq!(orbit.len(), 2);
        let sum = sum_outer_products(&orbit);
        assert_relative_eq!(sum[(0, 0)], 2.0 * 0.25, epsilon = 1e-15);
        assert_relative_eq!(sum[(1, 1)], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn full_axis_orbit_in_three_dims() {
        let g = Generator::canonicalize(&[1.0, 0.0, 0.0]).unwrap();
        let orbit = g.expand_orbit();
        assert_eq!(orbit.len(), 6);
        let sum = sum_outer_products(&orbit);
        assert_relative_eq!(sum, DMatrix::identity(3, 3) * 2.0, epsilon = 1e-14);
    }

    #[test]
    fn separation_of_square_orbits() {
        let axes = Generator::canonicalize(&[1.0, 0.0]).unwrap().expand_orbit();
        for d in nearest_neighbor_distances(&axes) {
            assert_relative_eq!(d, 2f64.sqrt(), epsilon = 1e-12);
        }
        // The diagonal orbit is the same square rotated by 45 degrees.
        let diag = Generator::canonicalize(&[1.0, 1.0]).unwrap().expand_orbit();
        for d in nearest_neighbor_distances(&diag) {
            assert_relative_eq!(d, 2f64.sqrt(), epsilon = 1e-12);
        }
    }

    #[test]
    fn separation_of_octagon_union() {
        let design = ReferenceSampling::from_generators(&[&[1.0, 0.0], &[1.0, 1.0]]).unwrap();
        let expected = 2.0 * (core::f64::consts::PI / 8.0).sin();
        for d in nearest_neighbor_distances(design.points()) {
            assert_relative_eq!(d, expected, epsilon = 1e-12);
        }
        assert_relative_eq!(min_separation(design.points()), expected, epsilon = 1e-12);
    }

    #[test]
    fn cumulative_unions_match_scenario_counts() {
        let sizes: Vec<usize> = (1..=4)
            .map(|g| ReferenceSampling::cumulative_ones(5, g).unwrap().len())
            .collect();
        assert_eq!(sizes, vec![10, 50, 130, 210]);
    }

    #[test]
    fn c_value_matches_outer_product_diagonal() {
        let design = ReferenceSampling::cumulative_ones(5, 2).unwrap();
        let sum = sum_outer_products(design.points());
        assert_relative_eq!(sum[(0, 0)], design.c_value(), epsilon = 1e-12);
        // Sanity: c = Σ orbit sizes / n for unit-norm generators.
        assert_relative_eq!(design.c_value(), 50.0 / 5.0, epsilon = 1e-12);
    }

    #[test]
    fn duplicate_basis_rejected() {
        let err = ReferenceSampling::from_generators(&[&[1.0, 0.0], &[0.0, -1.0]]);
        assert!(err.is_err());
    }
}
