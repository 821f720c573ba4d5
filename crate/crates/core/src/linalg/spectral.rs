use nalgebra::SymmetricEigen;

use super::hermitian::{HermitianMatrix, PositiveDefiniteMatrix};
use super::{CMatrix, Complex64};
use crate::error::{Error, Result};

const EIGH_MAX_ITERS: usize = 10_000;

/// Real spectrum (ascending) with unitary eigenvector columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    /// Sorts the pair ascending by eigenvalue.
    pub fn from_parts(eigenvalues: Vec<f64>, eigenvectors: CMatrix) -> Self {
        assert_eq!(eigenvalues.len(), eigenvectors.ncols());
        let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
        order.sort_by(|&i, &j| eigenvalues[i].total_cmp(&eigenvalues[j]));
        if order.iter().enumerate().all(|(k, &i)| k == i) {
            return Self { eigenvalues, eigenvectors };
        }
        let values = order.iter().map(|&i| eigenvalues[i]).collect();
        let vectors = CMatrix::from_fn(eigenvectors.nrows(), order.len(), |r, c| eigenvectors[(r, order[c])]);
        Self { eigenvalues: values, eigenvectors: vectors }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `U diag(values) U*`.
    pub fn compose(&self, values: &[f64]) -> HermitianMatrix {
        HermitianMatrix::from_hermitian_parts(with_spectrum(&self.eigenvectors, values))
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.compose(&self.eigenvalues)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let values: Vec<f64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        self.compose(&values)
    }

    pub fn try_map(&self, f: impl Fn(f64) -> Result<f64>) -> Result<HermitianMatrix> {
        let values = self.eigenvalues.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
        Ok(self.compose(&values))
    }

    /// `U* M U`, i.e. `M` expressed in the eigenbasis.
    pub fn to_eigenbasis(&self, m: &CMatrix) -> CMatrix {
        self.eigenvectors.adjoint() * m * &self.eigenvectors
    }

    /// `Re Tr(f(A) M)` without forming `f(A)`.
    pub fn trace_map_with(&self, f: impl Fn(f64) -> f64, m: &HermitianMatrix) -> f64 {
        let u = &self.eigenvectors;
        let mut acc = 0.0;
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let col = u.column(k);
            // <u_k, M u_k>
            let mu = m.matrix() * col;
            let quad: Complex64 = col.iter().zip(mu.iter()).map(|(a, b)| a.conj() * b).sum();
            acc += f(lambda) * quad.re;
        }
        acc
    }

    /// `max |U U* - I|`.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim();
        let g = &self.eigenvectors * self.eigenvectors.adjoint() - CMatrix::identity(n, n);
        g.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }
}

fn with_spectrum(u: &CMatrix, values: &[f64]) -> CMatrix {
    let mut scaled = u.clone();
    for (k, &v) in values.iter().enumerate() {
        scaled.column_mut(k).scale_mut(v);
    }
    scaled * u.adjoint()
}

/// Hermitian eigendecomposition backed by nalgebra's tridiagonal QR solver.
pub fn eigh(a: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let n = a.dim();
    let eig = SymmetricEigen::try_new(a.matrix().clone(), f64::EPSILON, EIGH_MAX_ITERS)
        .ok_or(Error::ConvergenceFailure { n })?;
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::ConvergenceFailure { n });
    }
    Ok(SpectralDecomposition::from_parts(values, eig.eigenvectors))
}

/// `f(A) = U diag(f(λ_i)) U*`; fails if `f` fails at any eigenvalue.
pub fn spectral_map(a: &HermitianMatrix, f: impl Fn(f64) -> Result<f64>) -> Result<HermitianMatrix> {
    eigh(a)?.try_map(f)
}

/// `A^t` for positive definite `A`.
pub fn matrix_power(a: &PositiveDefiniteMatrix, t: f64) -> PositiveDefiniteMatrix {
    a.power(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_hermitian, trial_rng};

    #[test]
    fn diagonal_spectrum_is_sorted() {
        let d = eigh(&HermitianMatrix::diagonal(&[2.0, 1.0])).unwrap();
        assert_eq!(d.eigenvalues(), &[1.0, 2.0]);
        let u = d.eigenvectors();
        // columns are a permutation of the identity (up to phase)
        assert!((u[(1, 0)].norm() - 1.0).abs() < 1e-14);
        assert!((u[(0, 1)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_and_pauli_x() {
        let d = eigh(&HermitianMatrix::identity(3)).unwrap();
        for v in d.eigenvalues() {
            assert!((v - 1.0).abs() < 1e-15);
        }
        let x = HermitianMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let d = eigh(&x).unwrap();
        assert!((d.eigenvalues()[0] + 1.0).abs() < 1e-14);
        assert!((d.eigenvalues()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn spectral_map_diagonal_sqrt_and_identity() {
        let a = HermitianMatrix::diagonal(&[1.0, 4.0]);
        let r = spectral_map(&a, |x| Ok(x.sqrt())).unwrap();
        assert!(r.max_abs_diff(&HermitianMatrix::diagonal(&[1.0, 2.0])) < 1e-14);
        let mut rng = trial_rng(3, 0);
        let b = random_hermitian(4, &mut rng);
        assert!(spectral_map(&b, Ok).unwrap().max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn spectral_square_matches_product() {
        let mut rng = trial_rng(7, 0);
        let a = random_hermitian(3, &mut rng);
        let sq = spectral_map(&a, |x| Ok(x * x)).unwrap();
        let direct = a.matrix() * a.matrix();
        let err = (sq.matrix() - direct).iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        assert!(err < 1e-10, "err = {err}");
        assert!(sq.commutator_norm(&a) < 1e-10);
    }

    #[test]
    fn spectral_map_propagates_domain_errors() {
        let a = HermitianMatrix::diagonal(&[1.0, -1.0]);
        let r = spectral_map(&a, |x| if x > 0.0 { Ok(x.ln()) } else { Err(Error::domain("log of non-positive")) });
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn matrix_power_cases() {
        let i = PositiveDefiniteMatrix::identity(2);
        assert!(matrix_power(&i, -3.0).as_hermitian().max_abs_diff(&HermitianMatrix::identity(2)) < 1e-14);
        let a = PositiveDefiniteMatrix::diagonal(&[4.0, 9.0]).unwrap();
        let r = matrix_power(&a, 0.5);
        assert!(r.as_hermitian().max_abs_diff(&HermitianMatrix::diagonal(&[2.0, 3.0])) < 1e-14);
        assert!(matrix_power(&a, 1.0).as_hermitian().max_abs_diff(a.as_hermitian()) < 1e-13);
        // negative exponents reverse the order; the decomposition must stay sorted
        let inv = matrix_power(&a, -1.0);
        assert!(inv.spectral().eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn trace_map_with_matches_dense() {
        let mut rng = trial_rng(5, 1);
        let a = random_hermitian(4, &mut rng);
        let m = random_hermitian(4, &mut rng);
        let d = a.eigh().unwrap();
        let dense = d.map(|x| x.exp()).trace_with(&m);
        assert!((d.trace_map_with(|x| x.exp(), &m) - dense).abs() < 1e-11);
    }
}
