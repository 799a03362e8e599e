//! Dense symmetric-matrix kernel.
//!
//! Small symmetric matrices (the curvature operator `R(t)` and the change of
//! variables `A(t)` live in dimension `n−1 ≤ 32`) with the handful of
//! operations the rest of the crate needs: eigendecomposition, the positive
//! semidefinite square root, and Loewner-order tests. Tolerances are measured
//! against the spectral norm so they are scale invariant.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Relative clamping tolerance at the PSD boundary.
pub const PSD_TOL: f64 = 1e-10;

/// Dense real symmetric matrix, stored row-major.
///
/// Symmetry is enforced at construction by averaging `M` with its transpose,
/// so `entry(i, j) == entry(j, i)` holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    m: DMatrix<f64>,
}

/// Eigendecomposition `M = Q·diag(λ)·Qᵀ` with eigenvalues sorted ascending.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Orthogonal matrix whose columns are the eigenvectors, in the same
    /// order as `values`.
    pub vectors: DMatrix<f64>,
}

impl SymMatrix {
    /// Builds a symmetric matrix from row-major entries, averaging `M` and
    /// `Mᵀ`.
    pub fn new(dim: usize, entries: &[f64]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParams("matrix dimension must be ≥ 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {dim}×{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let m = DMatrix::from_row_slice(dim, dim, entries);
        Ok(Self::from_matrix_unchecked(m))
    }

    /// Symmetrizes an arbitrary square matrix by averaging with its transpose.
    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "expected a nonempty square matrix, got {}×{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self::from_matrix_unchecked(m.clone()))
    }

    fn from_matrix_unchecked(mut m: DMatrix<f64>) -> Self {
        let dim = m.nrows();
        for i in 0..dim {
            for j in (i + 1)..dim {
                let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
                m[(i, j)] = avg;
                m[(j, i)] = avg;
            }
        }
        Self { m }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        Self {
            m: DMatrix::from_diagonal(&DVector::from_row_slice(entries)),
        }
    }

    /// `c·I` of the given dimension.
    pub fn scaled_identity(dim: usize, c: f64) -> Self {
        Self {
            m: DMatrix::identity(dim, dim) * c,
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    /// Eigendecomposition with eigenvalues sorted ascending.
    pub fn eigen(&self) -> Eigen {
        let se = self.m.clone().symmetric_eigen();
        let dim = self.dim();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
        let values: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
        let mut vectors = DMatrix::zeros(dim, dim);
        for (col, &k) in order.iter().enumerate() {
            vectors.set_column(col, &se.eigenvectors.column(k));
        }
        Eigen { values, vectors }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen().values
    }

    /// Spectral norm: the largest eigenvalue magnitude.
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues()
            .iter()
            .fold(0.0, |acc, l| acc.max(l.abs()))
    }

    /// Positive square root of a positive semidefinite matrix.
    ///
    /// Eigenvalue dust in `[−PSD_TOL·‖M‖, 0)` is clamped to zero; anything
    /// below that reports [`Error::NotPositiveSemidefinite`], which in the
    /// curvature context signals a violated sectional bound `K ≤ ρ`.
    pub fn psd_sqrt(&self) -> Result<SymMatrix> {
        let dim = self.dim();
        if self.is_diagonal() {
            // Exact fast path for model operators.
            let mut d = Vec::with_capacity(dim);
            let tol = PSD_TOL * self.spectral_norm();
            for i in 0..dim {
                let v = self.m[(i, i)];
                if v < -tol {
                    return Err(Error::NotPositiveSemidefinite { lambda_min: v, tol });
                }
                d.push(v.max(0.0).sqrt());
            }
            return Ok(SymMatrix::diagonal(&d));
        }
        let eig = self.eigen();
        let scale = eig.values.iter().fold(0.0_f64, |acc, l| acc.max(l.abs()));
        let tol = PSD_TOL * scale;
        let lambda_min = eig.values[0];
        if lambda_min < -tol {
            return Err(Error::NotPositiveSemidefinite { lambda_min, tol });
        }
        let sqrt = DVector::from_iterator(dim, eig.values.iter().map(|l| l.max(0.0).sqrt()));
        let s = &eig.vectors * DMatrix::from_diagonal(&sqrt) * eig.vectors.transpose();
        Ok(SymMatrix::from_matrix_unchecked(s))
    }

    fn is_diagonal(&self) -> bool {
        let dim = self.dim();
        for i in 0..dim {
            for j in 0..dim {
                if i != j && self.m[(i, j)] != 0.0 {
                    return false;
                }
            }
        }
        true
    }

    /// Loewner order test: `self ≤ other` iff `λ_min(other − self) ≥ −tol`.
    pub fn loewner_leq(&self, other: &SymMatrix, tol: f64) -> Result<bool> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "loewner_leq: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        let diff = SymMatrix::from_matrix_unchecked(&other.m - &self.m);
        Ok(diff.eigenvalues()[0] >= -tol)
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, other: &SymMatrix, c: f64) -> Result<SymMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "add_scaled: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(SymMatrix::from_matrix_unchecked(&self.m + &other.m * c))
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        SymMatrix { m: &self.m * c }
    }

    /// Conjugation `Qᵀ·M·Q` (symmetric for orthogonal `Q`).
    pub fn conjugate(&self, q: &DMatrix<f64>) -> Result<SymMatrix> {
        if q.nrows() != self.dim() || q.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "conjugate: {}×{} vs dim {}",
                q.nrows(),
                q.ncols(),
                self.dim()
            )));
        }
        Ok(SymMatrix::from_matrix_unchecked(
            q.transpose() * &self.m * q,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(dim: usize, rng: &mut ChaCha8Rng) -> SymMatrix {
        let entries: Vec<f64> = (0..dim * dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
        SymMatrix::new(dim, &entries).unwrap()
    }

    fn random_orthogonal(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        // QR of a random matrix.
        let entries: Vec<f64> = (0..dim * dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let m = DMatrix::from_row_slice(dim, dim, &entries);
        m.qr().q()
    }

    #[test]
    fn eigen_identity() {
        let eig = SymMatrix::identity(3).eigen();
        assert_eq!(eig.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn eigen_ch2_operator() {
        // Curvature operator of the complex hyperbolic plane.
        let eig = SymMatrix::diagonal(&[-4.0, -1.0, -1.0]).eigen();
        assert_abs_diff_eq!(eig.values[0], -4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eig.values[1], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eig.values[2], -1.0, epsilon = 1e-14);
    }

    #[test]
    fn eigen_multiply_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in [1, 2, 3, 5, 8] {
            let m = random_symmetric(dim, &mut rng);
            let eig = m.eigen();
            let lam = DMatrix::from_diagonal(&DVector::from_row_slice(&eig.values));
            let back = &eig.vectors * lam * eig.vectors.transpose();
            let scale = m.spectral_norm().max(1.0);
            let err = (&back - m.as_matrix()).amax();
            assert!(
                err <= 1e-12 * scale,
                "reconstruction error {err} at dim {dim}"
            );
            for w in eig.values.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }

    #[test]
    fn psd_sqrt_identity() {
        let s = SymMatrix::identity(2).psd_sqrt().unwrap();
        assert_eq!(s, SymMatrix::identity(2));
    }

    #[test]
    fn psd_sqrt_diag_411() {
        // sqrt(diag(4,1,1)) = diag(2,1,1); the square-rooted eigenvalues sum to 4.
        let s = SymMatrix::diagonal(&[4.0, 1.0, 1.0]).psd_sqrt().unwrap();
        assert_abs_diff_eq!(s.entry(0, 0), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.entry(1, 1), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.trace(), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn psd_sqrt_squaring_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for dim in [2, 3, 6] {
            let b = random_symmetric(dim, &mut rng);
            let m = SymMatrix::from_matrix(&(b.as_matrix().transpose() * b.as_matrix())).unwrap();
            let s = m.psd_sqrt().unwrap();
            let back = s.as_matrix() * s.as_matrix();
            let err = (&back - m.as_matrix()).amax();
            assert!(err <= 1e-10 * m.spectral_norm().max(1.0), "S² ≠ M: {err}");
        }
    }

    #[test]
    fn psd_sqrt_rejects_negative() {
        let m = SymMatrix::diagonal(&[1.0, -0.5]);
        assert!(matches!(
            m.psd_sqrt(),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn psd_sqrt_clamps_dust() {
        // A tiny negative eigenvalue within tolerance is treated as zero.
        let m = SymMatrix::diagonal(&[1.0, -1e-12]);
        let s = m.psd_sqrt().unwrap();
        assert_eq!(s.entry(1, 1), 0.0);
    }

    #[test]
    fn loewner_basics() {
        let m = SymMatrix::diagonal(&[3.0, -1.0]);
        assert!(m.loewner_leq(&m, 0.0).unwrap());

        // ℂH² operator is ≤ 0·I: nonpositive curvature.
        let ch2 = SymMatrix::diagonal(&[-4.0, -1.0, -1.0]);
        assert!(ch2.loewner_leq(&SymMatrix::zeros(3), 1e-12).unwrap());

        // diag(1,0) vs diag(0,1): difference has eigenvalue +1 and −1.
        let a = SymMatrix::diagonal(&[1.0, 0.0]);
        let b = SymMatrix::diagonal(&[0.0, 1.0]);
        assert!(!a.loewner_leq(&b, 1e-12).unwrap());
    }

    #[test]
    fn loewner_dim_mismatch() {
        let a = SymMatrix::identity(2);
        let b = SymMatrix::identity(3);
        assert!(matches!(
            a.loewner_leq(&b, 0.0),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn loewner_partial_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let tol = 1e-12;
        for _ in 0..20 {
            let dim = rng.gen_range(1..=5);
            let a = random_symmetric(dim, &mut rng);
            // b = a + PSD, c = b + PSD: a chain to exercise transitivity.
            let p = random_symmetric(dim, &mut rng);
            let psd1 =
                SymMatrix::from_matrix(&(p.as_matrix().transpose() * p.as_matrix())).unwrap();
            let q = random_symmetric(dim, &mut rng);
            let psd2 =
                SymMatrix::from_matrix(&(q.as_matrix().transpose() * q.as_matrix())).unwrap();
            let b = a.add_scaled(&psd1, 1.0).unwrap();
            let c = b.add_scaled(&psd2, 1.0).unwrap();

            assert!(a.loewner_leq(&a, tol).unwrap(), "reflexive");
            assert!(a.loewner_leq(&b, tol).unwrap());
            assert!(b.loewner_leq(&c, tol).unwrap());
            // Transitivity with the Weyl-inequality slack.
            assert!(a.loewner_leq(&c, 2.0 * tol).unwrap(), "transitive");

            // Antisymmetry within tolerance: mutual ≤ forces near equality.
            if b.loewner_leq(&a, tol).unwrap() {
                let diff = b.add_scaled(&a, -1.0).unwrap();
                assert!(diff.spectral_norm() <= tol);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// psd_sqrt commutes with orthogonal conjugation.
        #[test]
        fn sqrt_conjugation_equivariance(seed in 0u64..1000, dim in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = random_symmetric(dim, &mut rng);
            let m = SymMatrix::from_matrix(&(b.as_matrix().transpose() * b.as_matrix())).unwrap();
            let q = random_orthogonal(dim, &mut rng);

            let lhs = m.conjugate(&q).unwrap().psd_sqrt().unwrap();
            let rhs = m.psd_sqrt().unwrap().conjugate(&q).unwrap();
            let err = (lhs.as_matrix() - rhs.as_matrix()).amax();
            prop_assert!(err <= 1e-9 * m.spectral_norm().max(1.0), "equivariance error {err}");
        }

        /// Tr(sqrt(M)) equals the sum of square-rooted eigenvalues.
        #[test]
        fn sqrt_trace_identity(seed in 0u64..1000, dim in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = random_symmetric(dim, &mut rng);
            let m = SymMatrix::from_matrix(&(b.as_matrix().transpose() * b.as_matrix())).unwrap();
            let lhs = m.psd_sqrt().unwrap().trace();
            let rhs: f64 = m.eigenvalues().iter().map(|l| l.max(0.0).sqrt()).sum();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1.0));
        }

        /// Construction symmetrizes exactly.
        #[test]
        fn construction_symmetrizes(seed in 0u64..1000, dim in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let entries: Vec<f64> = (0..dim*dim).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let m = SymMatrix::new(dim, &entries).unwrap();
            for i in 0..dim {
                for j in 0..dim {
                    prop_assert_eq!(m.entry(i, j), m.entry(j, i));
                }
            }
        }
    }
}
