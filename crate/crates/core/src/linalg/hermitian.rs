use std::ops::{Add, Mul, Neg, Sub};

use super::spectral::{eigh, SpectralDecomposition};
use super::{CMatrix, Complex64};
use crate::error::{Error, Result};

/// Smallest admissible eigenvalue of a [`PositiveDefiniteMatrix`].
pub const PD_FLOOR: f64 = 1e-10;
/// Slack on the operator norm of a [`ContractionMatrix`].
pub const CONTRACTION_TOL: f64 = 1e-12;
/// Max-entry tolerance on `H*H - I` for an isometry.
pub const ISOMETRY_TOL: f64 = 1e-10;
/// Allowed deviation of `Tr X` from one for a [`DensityMatrix`].
pub const DENSITY_TRACE_TOL: f64 = 1e-10;

const HERM_REL_TOL: f64 = 1e-12;
const HERM_ABS_FLOOR: f64 = 1e-14;
const TRACE_IMAG_TOL: f64 = 1e-10;

/// `Re Tr(AB)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.ncols(), b.nrows());
    assert_eq!(a.nrows(), b.ncols());
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    debug_assert!(
        acc.im.abs() <= TRACE_IMAG_TOL * (1.0 + acc.re.abs()),
        "trace of a Hermitian product has imaginary part {}",
        acc.im
    );
    acc.re
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Dense `n x n` complex Hermitian matrix.
///
/// The stored entries are always exactly Hermitian: constructors replace the
/// input `M` by `(M + M*)/2` after checking that the skew part is within
/// tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    data: CMatrix,
}

impl HermitianMatrix {
    /// Validates hermiticity up to `max(1e-12 * max|m_ij|, 1e-14)`.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(Error::DimensionMismatch("empty matrix".into()));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("matrix has non-finite entries"));
        }
        let tolerance = (HERM_REL_TOL * max_abs(&m)).max(HERM_ABS_FLOOR);
        let deviation = max_abs(&(&m - m.adjoint()));
        if deviation > tolerance {
            return Err(Error::NonHermitianInput { deviation, tolerance });
        }
        Ok(Self { data: symmetrize(&m) })
    }

    /// For matrices that are Hermitian by construction (e.g. `H* A H`); only
    /// symmetrizes away roundoff.
    pub(crate) fn from_hermitian_parts(m: CMatrix) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Self { data: symmetrize(&m) }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!("row {i} has length {}, expected {n}", row.len())));
            }
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = Complex64::new(*v, 0.0);
            }
        }
        Self::new(m)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        assert!(!values.is_empty());
        let n = values.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(*v, 0.0);
        }
        Self { data: m }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, 1.0)
    }

    pub fn zeros(n: usize) -> Self {
        Self::scalar(n, 0.0)
    }

    /// `c * I`.
    pub fn scalar(n: usize, c: f64) -> Self {
        assert!(n >= 1);
        Self::diagonal(&vec![c; n])
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.data[(i, i)].re).sum()
    }

    /// `Re Tr(self * other)`.
    pub fn trace_with(&self, other: &HermitianMatrix) -> f64 {
        trace_product(&self.data, &other.data)
    }

    pub fn eigh(&self) -> Result<SpectralDecomposition> {
        eigh(self)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { data: self.data.scale(s) }
    }

    /// `self + c * I`.
    pub fn shift(&self, c: f64) -> Self {
        let mut m = self.data.clone();
        for i in 0..self.dim() {
            m[(i, i)] += Complex64::new(c, 0.0);
        }
        Self { data: m }
    }

    /// Max-entry distance.
    pub fn max_abs_diff(&self, other: &HermitianMatrix) -> f64 {
        max_abs(&(&self.data - &other.data))
    }

    pub fn max_abs_entry(&self) -> f64 {
        max_abs(&self.data)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.norm()
    }

    /// Max-entry norm of the commutator `AB - BA`.
    pub fn commutator_norm(&self, other: &HermitianMatrix) -> f64 {
        let ab = &self.data * &other.data;
        let ba = &other.data * &self.data;
        max_abs(&(ab - ba))
    }

    /// `U* A U`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        Self::from_hermitian_parts(u.adjoint() * &self.data * u)
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix { data: &self.data + &rhs.data }
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix { data: &self.data - &rhs.data }
    }
}

impl Neg for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        HermitianMatrix { data: -&self.data }
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, rhs: f64) -> HermitianMatrix {
        self.scale(rhs)
    }
}

/// Hermitian matrix with spectrum strictly above [`PD_FLOOR`].
///
/// The spectral decomposition is computed once at construction and reused by
/// every matrix function of the operand.
#[derive(Debug, Clone)]
pub struct PositiveDefiniteMatrix {
    base: HermitianMatrix,
    spectral: SpectralDecomposition,
    min_eig: f64,
}

impl PositiveDefiniteMatrix {
    pub fn new(base: HermitianMatrix) -> Result<Self> {
        let spectral = base.eigh()?;
        Self::from_parts(base, spectral)
    }

    pub(crate) fn from_parts(base: HermitianMatrix, spectral: SpectralDecomposition) -> Result<Self> {
        let min_eig = spectral.min_eigenvalue();
        if !spectral.max_eigenvalue().is_finite() {
            return Err(Error::domain("spectrum is not finite"));
        }
        if !(min_eig > PD_FLOOR) {
            return Err(Error::NotPositiveDefinite { min_eig, floor: PD_FLOOR });
        }
        Ok(Self { base, spectral, min_eig })
    }

    /// Builds `U diag(values) U*` directly from a spectral pair.
    pub fn from_spectrum(eigenvectors: CMatrix, values: Vec<f64>) -> Result<Self> {
        let spectral = SpectralDecomposition::from_parts(values, eigenvectors);
        let base = spectral.reconstruct();
        Self::from_parts(base, spectral)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::diagonal(values))
    }

    pub fn identity(n: usize) -> Self {
        Self::new(HermitianMatrix::identity(n)).expect("identity is positive definite")
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.base
    }

    pub fn into_hermitian(self) -> HermitianMatrix {
        self.base
    }

    pub fn matrix(&self) -> &CMatrix {
        self.base.matrix()
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    pub fn min_eig(&self) -> f64 {
        self.min_eig
    }

    pub fn max_eig(&self) -> f64 {
        self.spectral.max_eigenvalue()
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn trace(&self) -> f64 {
        self.spectral.eigenvalues().iter().sum()
    }

    /// `A^t`.
    pub fn power(&self, t: f64) -> PositiveDefiniteMatrix {
        let values = self.spectral.eigenvalues().iter().map(|&x| (t * x.ln()).exp()).collect();
        PositiveDefiniteMatrix::from_spectrum(self.spectral.eigenvectors().clone(), values)
            .expect("power of a positive definite matrix is positive definite")
    }

    /// `f(A)` for a real function of the spectrum.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        self.spectral.map(f)
    }

    pub fn scale(&self, s: f64) -> Result<Self> {
        let values = self.spectral.eigenvalues().iter().map(|x| x * s).collect();
        Self::from_spectrum(self.spectral.eigenvectors().clone(), values)
    }
}

impl PartialEq for PositiveDefiniteMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
    }
}

/// Positive definite matrix of unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(PositiveDefiniteMatrix);

impl DensityMatrix {
    /// Refuses (does not renormalize) inputs with `|Tr X - 1| > 1e-10`.
    pub fn new(x: PositiveDefiniteMatrix) -> Result<Self> {
        let deviation = (x.trace() - 1.0).abs();
        if deviation > DENSITY_TRACE_TOL {
            return Err(Error::NotADensityMatrix { deviation });
        }
        Ok(Self(x))
    }

    /// `X / Tr X`.
    pub fn normalized(x: &PositiveDefiniteMatrix) -> Result<Self> {
        let t = x.trace();
        Self::new(x.scale(1.0 / t)?)
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self(PositiveDefiniteMatrix::identity(n).scale(1.0 / n as f64).expect("I/n is positive definite"))
    }

    pub fn as_pd(&self) -> &PositiveDefiniteMatrix {
        &self.0
    }

    pub fn into_pd(self) -> PositiveDefiniteMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

/// Rectangular matrix with operator norm at most one.
///
/// `rows` is the dimension of the space `H` maps into; `H* A H` takes a
/// `rows x rows` matrix `A` to a `cols x cols` one.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionMatrix {
    data: CMatrix,
    op_norm: f64,
}

impl ContractionMatrix {
    pub fn new(data: CMatrix) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::DimensionMismatch("empty contraction".into()));
        }
        let op_norm = operator_norm(&data)?;
        if op_norm > 1.0 + CONTRACTION_TOL {
            return Err(Error::NotAContraction { op_norm });
        }
        Ok(Self { data, op_norm })
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    /// `s * I` for `|s| <= 1`.
    pub fn scaled_identity(n: usize, s: f64) -> Self {
        assert!(s.abs() <= 1.0 + CONTRACTION_TOL);
        let data = CMatrix::identity(n, n).scale(s);
        Self { data, op_norm: s.abs() }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn op_norm(&self) -> f64 {
        self.op_norm
    }

    /// `H* H`.
    pub fn gram(&self) -> HermitianMatrix {
        HermitianMatrix::from_hermitian_parts(self.data.adjoint() * &self.data)
    }

    pub fn is_isometry(&self) -> bool {
        self.gram().max_abs_diff(&HermitianMatrix::identity(self.cols())) <= ISOMETRY_TOL
    }

    /// `H* A H`.
    pub fn sandwich(&self, a: &HermitianMatrix) -> Result<HermitianMatrix> {
        if a.dim() != self.rows() {
            return Err(Error::DimensionMismatch(format!(
                "H is {}x{} but A is {}x{}",
                self.rows(),
                self.cols(),
                a.dim(),
                a.dim()
            )));
        }
        Ok(HermitianMatrix::from_hermitian_parts(self.data.adjoint() * a.matrix() * &self.data))
    }

    /// `U* H V` for unitaries `U` (rows) and `V` (cols).
    pub fn rotate(&self, u: &CMatrix, v: &CMatrix) -> Self {
        Self { data: u.adjoint() * &self.data * v, op_norm: self.op_norm }
    }
}

fn operator_norm(m: &CMatrix) -> Result<f64> {
    let gram = HermitianMatrix::from_hermitian_parts(m.adjoint() * m);
    Ok(gram.eigh()?.max_eigenvalue().max(0.0).sqrt())
}
