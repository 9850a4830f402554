//! Scalar and matrix primitives shared by every other module: SPD
//! factorization with the covariance-repair jitter, the chi-square tail
//! function and its inverse (the radial solve), and seeded randomness.

mod gamma;
mod rng;

pub use rng::SeededRandomSource;

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Relative tolerance for the symmetry check on covariance matrices.
const SYMMETRY_TOL: f64 = 1e-12;

/// One-shot diagonal jitter applied when a raw Cholesky factorization
/// fails: `JITTER_SCALE * trace(P) / n` is added to every diagonal entry
/// and the factorization retried once.
const JITTER_SCALE: f64 = 1e-9;

/// A validated symmetric matrix intended to be positive definite.
///
/// Symmetry is enforced at construction; definiteness is established by
/// [`cholesky`], which is where filter divergence surfaces.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    m: DMatrix<f64>,
}

impl SpdMatrix {
    /// Wraps a square matrix, rejecting asymmetry beyond
    /// `1e-12 * max(1, |entry|)` per element.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::DimensionMismatch);
        }
        for i in 0..m.nrows() {
            for j in 0..i {
                let diff = (m[(i, j)] - m[(j, i)]).abs();
                if diff > SYMMETRY_TOL * m[(i, j)].abs().max(1.0) {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        Ok(Self { m })
    }

    /// Symmetrizes `(m + mᵀ)/2` before wrapping. Filters use this each
    /// step so that round-off asymmetry never escalates.
    pub fn from_symmetrized(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::DimensionMismatch);
        }
        let sym = (&m + m.transpose()) * 0.5;
        Ok(Self { m: sym })
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::DimensionMismatch);
        }
        Ok(Self {
            m: DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: DMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }
}

/// Lower-triangular Cholesky factor `L` with `L·Lᵀ = P` and a strictly
/// positive diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTriangularFactor {
    l: DMatrix<f64>,
}

impl LowerTriangularFactor {
    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.l
    }

    pub fn column(&self, i: usize) -> DVector<f64> {
        self.l.column(i).into_owned()
    }

    /// `L·Lᵀ`, for multiply-back checks.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.l * self.l.transpose()
    }

    /// `√|P| = ∏ L_ii`.
    pub fn sqrt_determinant(&self) -> f64 {
        self.l.diagonal().iter().product()
    }

    /// Solves `L y = b`.
    pub fn forward_solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        let mut y = DVector::zeros(n);
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[(i, k)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        y
    }

    /// Solves `Lᵀ x = b`.
    pub fn backward_solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        let mut x = DVector::zeros(n);
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s -= self.l[(k, i)] * x[k];
            }
            x[i] = s / self.l[(i, i)];
        }
        x
    }

    /// Solves `P x = b` through the factor (forward then backward solve).
    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        self.backward_solve(&self.forward_solve(b))
    }

    /// Solves `P X = B` column by column.
    pub fn solve_matrix(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(b.nrows(), b.ncols());
        for j in 0..b.ncols() {
            let col = self.solve(&b.column(j).into_owned());
            out.set_column(j, &col);
        }
        out
    }
}

fn raw_cholesky(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = m.nrows();
    let mut l = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= 0.0 || !d.is_finite() {
            return None;
        }
        let root = d.sqrt();
        l[(j, j)] = root;
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / root;
        }
    }
    Some(l)
}

/// Cholesky factorization with the one-shot jitter retry.
///
/// On a raw failure, `1e-9 · trace(P)/n` is added to the diagonal once and
/// the factorization retried; a second failure is reported as
/// [`Error::NotPositiveDefinite`], which callers treat as filter divergence.
pub fn cholesky(p: &SpdMatrix) -> Result<LowerTriangularFactor> {
    if let Some(l) = raw_cholesky(&p.m) {
        return Ok(LowerTriangularFactor { l });
    }
    let n = p.dim();
    let jitter = JITTER_SCALE * p.trace() / n as f64;
    let mut repaired = p.m.clone();
    for i in 0..n {
        repaired[(i, i)] += jitter;
    }
    match raw_cholesky(&repaired) {
        Some(l) => Ok(LowerTriangularFactor { l }),
        None => Err(Error::NotPositiveDefinite),
    }
}

/// Probability that a standard n-dimensional Gaussian has squared norm
/// exceeding `r`; equals the regularized upper incomplete gamma
/// `Q(n/2, r/2)`.
pub fn chi_square_survival(n: usize, r: f64) -> f64 {
    assert!(n >= 1, "dimension must be at least 1");
    assert!(r >= 0.0 && r.is_finite(), "squared radius must be >= 0");
    gamma::gamma_q(n as f64 / 2.0, r / 2.0)
}

/// Iteration cap for the bracketing quantile solve.
const QUANTILE_MAX_ITER: usize = 200;

/// Inverse of [`chi_square_survival`] in its second argument: the squared
/// radius whose upper tail carries mass `d`.
///
/// Solved by bisection on `[0, B]` with `B` grown geometrically until the
/// tail at `B` drops below `d`; absolute tolerance 1e-12.
pub fn chi_square_upper_quantile(n: usize, d: f64) -> Result<f64> {
    assert!(n >= 1, "dimension must be at least 1");
    if !(0.0..=1.0).contains(&d) || d.is_nan() {
        return Err(Error::InvalidDomain("tail mass d must lie in [0, 1]"));
    }
    if d == 0.0 {
        return Err(Error::ZeroTailMass);
    }
    if d == 1.0 {
        return Ok(0.0);
    }

    let mut hi = 1.0;
    let mut grow = 0;
    while chi_square_survival(n, hi) >= d {
        hi *= 2.0;
        grow += 1;
        if grow > QUANTILE_MAX_ITER {
            return Err(Error::NonConvergent);
        }
    }

    let mut lo = 0.0;
    for _ in 0..QUANTILE_MAX_ITER {
        if hi - lo < 1e-12 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let s = chi_square_survival(n, mid);
        if s == d {
            return Ok(mid);
        }
        // Survival decreases in r: tail still too heavy means r too small.
        if s > d {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Weighted mean of a set of column vectors.
pub fn weighted_mean(points: &[DVector<f64>], weights: &[f64]) -> DVector<f64> {
    debug_assert_eq!(points.len(), weights.len());
    let n = points[0].len();
    let mut mean = DVector::zeros(n);
    for (p, &w) in points.iter().zip(weights) {
        mean.axpy(w, p, 1.0);
    }
    mean
}

/// Weighted covariance of a set of column vectors about `center`.
pub fn weighted_covariance(
    points: &[DVector<f64>],
    weights: &[f64],
    center: &DVector<f64>,
) -> DMatrix<f64> {
    debug_assert_eq!(points.len(), weights.len());
    let n = center.len();
    let mut cov = DMatrix::zeros(n, n);
    for (p, &w) in points.iter().zip(weights) {
        let d = p - center;
        cov.syger(w, &d, &d, 1.0);
    }
    // syger fills the lower triangle; mirror it.
    for i in 0..n {
        for j in i + 1..n {
            cov[(i, j)] = cov[(j, i)];
        }
    }
    cov
}

/// Frobenius-norm relative difference, guarded for the zero matrix.
pub fn relative_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let denom = b.norm().max(1e-300);
    (a - b).norm() / denom
}

/// Draws an n×n random SPD matrix `A·Aᵀ + ridge·I`; shared by tests and
/// benchmark setup code.
pub fn random_spd(n: usize, ridge: f64, rng: &mut SeededRandomSource) -> SpdMatrix {
    let a = DMatrix::from_fn(n, n, |_, _| rng.next_standard_normal());
    let m = &a * a.transpose() + DMatrix::identity(n, n) * ridge;
    SpdMatrix::from_symmetrized(m).expect("construction is symmetric")
}

/// Draws a length-n standard normal vector.
pub fn random_vector(n: usize, rng: &mut SeededRandomSource) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.next_standard_normal())
}
