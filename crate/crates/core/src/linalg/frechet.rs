use super::hermitian::HermitianMatrix;
use super::spectral::SpectralDecomposition;
use super::CMatrix;
use crate::error::{Error, Result};

/// Eigenvalue gap below which the divided difference is replaced by `f'` at
/// the midpoint.
pub const DD_TOL: f64 = 1e-7;

/// Directional derivative `d/dt f(A + tB)` at `t = 0` (Daleckii–Krein).
pub fn frechet_derivative(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    f: impl Fn(f64) -> Result<f64>,
    f_prime: impl Fn(f64) -> Result<f64>,
) -> Result<HermitianMatrix> {
    frechet_derivative_with(&a.eigh()?, b, f, f_prime)
}

/// Same as [`frechet_derivative`] with a precomputed decomposition of `A`.
pub fn frechet_derivative_with(
    a: &SpectralDecomposition,
    b: &HermitianMatrix,
    f: impl Fn(f64) -> Result<f64>,
    f_prime: impl Fn(f64) -> Result<f64>,
) -> Result<HermitianMatrix> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch(format!("A is {n}x{n} but B is {}x{}", b.dim(), b.dim())));
    }
    let lambda = a.eigenvalues();
    let f_values = lambda.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    let mut kernel = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let gap = lambda[i] - lambda[j];
            kernel[i * n + j] = if gap.abs() > DD_TOL {
                (f_values[i] - f_values[j]) / gap
            } else {
                f_prime(0.5 * (lambda[i] + lambda[j]))?
            };
        }
    }
    let mut inner = a.to_eigenbasis(b.matrix());
    for i in 0..n {
        for j in 0..n {
            inner[(i, j)] *= kernel[i * n + j];
        }
    }
    let u = a.eigenvectors();
    let out: CMatrix = u * inner * u.adjoint();
    Ok(HermitianMatrix::from_hermitian_parts(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log(x: f64) -> Result<f64> {
        if x > 0.0 {
            Ok(x.ln())
        } else {
            Err(Error::domain("log"))
        }
    }

    fn recip(x: f64) -> Result<f64> {
        Ok(1.0 / x)
    }

    #[test]
    fn commuting_case_is_f_prime_times_b() {
        let a = HermitianMatrix::diagonal(&[1.0, 2.0]);
        let b = HermitianMatrix::identity(2);
        let d = frechet_derivative(&a, &b, log, recip).unwrap();
        assert!(d.max_abs_diff(&HermitianMatrix::diagonal(&[1.0, 0.5])) < 1e-14);
    }

    #[test]
    fn zero_direction_gives_zero() {
        let a = HermitianMatrix::diagonal(&[1.0, 3.0, 5.0]);
        let d = frechet_derivative(&a, &HermitianMatrix::zeros(3), log, recip).unwrap();
        assert!(d.max_abs_entry() < 1e-15);
    }

    #[test]
    fn degenerate_spectrum_uses_derivative() {
        // A = I: every pair is degenerate, so Df(I)[B] = f'(1) B
        let b = HermitianMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 2.0]]).unwrap();
        let d = frechet_derivative(&HermitianMatrix::identity(2), &b, log, recip).unwrap();
        assert!(d.max_abs_diff(&b) < 1e-14);
    }

    #[test]
    fn domain_errors_propagate() {
        let a = HermitianMatrix::diagonal(&[-1.0, 2.0]);
        assert!(frechet_derivative(&a, &HermitianMatrix::identity(2), log, recip).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let a = HermitianMatrix::identity(2);
        assert!(frechet_derivative(&a, &HermitianMatrix::identity(3), log, recip).is_err());
    }
}
