//! One-dimensional Gauss–Hermite nodes and weights for the unit-variance
//! Gaussian weight function, via the Golub–Welsch eigenproblem on the
//! symmetric tridiagonal Jacobi matrix (zero diagonal, off-diagonal √k).

use alloc::vec::Vec;
use nalgebra::DMatrix;
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Returns `(nodes, weights)` sorted by node, with Σ weights = 1.
pub fn hermite_rule(points: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(points >= 1);
    let mut jacobi = DMatrix::<f64>::zeros(points, points);
    for k in 1..points {
        let b = (k as f64).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eigen = jacobi.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..points)
        .map(|j| {
            let first = eigen.eigenvectors[(0, j)];
            (eigen.eigenvalues[j], first * first)
        })
        .collect();
    pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_point_rule() {
        let (nodes, weights) = hermite_rule(2);
        assert_relative_eq!(nodes[0], -1.0, epsilon = 1e-12);
        assert_relative_eq!(nodes[1], 1.0, epsilon = 1e-12);
        assert_relative_eq!(weights[0], 0.5, epsilon = 1e-12);
        assert_relative_eq!(weights[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn three_point_rule() {
        let (nodes, weights) = hermite_rule(3);
        let root3 = 3f64.sqrt();
        assert_relative_eq!(nodes[0], -root3, epsilon = 1e-10);
        assert_relative_eq!(nodes[1], 0.0, epsilon = 1e-10);
        assert_relative_eq!(nodes[2], root3, epsilon = 1e-10);
        assert_relative_eq!(weights[0], 1.0 / 6.0, epsilon = 1e-12);
        assert_relative_eq!(weights[1], 2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(weights[2], 1.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn moments_up_to_degree_nine() {
        // An m-point rule integrates polynomials of degree 2m-1 exactly;
        // standard normal moments are 0, 1, 0, 3, 0, 15, 0, 105, ...
        let (nodes, weights) = hermite_rule(5);
        let expected = [1.0, 0.0, 1.0, 0.0, 3.0, 0.0, 15.0, 0.0, 105.0];
        for (degree, want) in expected.iter().enumerate() {
            let got: f64 = nodes
                .iter()
                .zip(&weights)
                .map(|(x, w)| w * x.powi(degree as i32))
                .sum();
            assert_relative_eq!(got, *want, epsilon = 1e-9);
        }
    }
}
