use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use super::hermitian::{ContractionMatrix, DensityMatrix, HermitianMatrix, PositiveDefiniteMatrix};
use super::{CMatrix, Complex64};
use crate::error::{Error, Result};

/// Generator behind every random draw in the crate.
pub type TrialRng = Xoshiro256PlusPlus;

/// Per-trial generator: the stream for trial `k` of a run seeded with `seed`
/// is `seed ^ k`, independent of execution order.
pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    Xoshiro256PlusPlus::seed_from_u64(seed ^ trial)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    Hermitian,
    PositiveDefinite,
    Density,
    Contraction,
    Isometry,
    NegativeDefinite,
}

/// Description of a seeded random matrix draw.
///
/// `n` is the (row) dimension; `cols` only matters for contractions and
/// isometries and defaults to `n`. `eig_lo`/`eig_hi` bound the spectrum for
/// the definite and density ensembles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomEnsembleSpec {
    pub kind: EnsembleKind,
    pub n: usize,
    #[serde(default)]
    pub cols: Option<usize>,
    pub eig_lo: f64,
    pub eig_hi: f64,
    pub seed: u64,
}

impl RandomEnsembleSpec {
    pub fn new(kind: EnsembleKind, n: usize, seed: u64) -> Self {
        let (eig_lo, eig_hi) = match kind {
            EnsembleKind::NegativeDefinite => (-2.0, -0.1),
            _ => (0.1, 2.0),
        };
        Self { kind, n, cols: None, eig_lo, eig_hi, seed }
    }

    pub fn with_spectrum(mut self, eig_lo: f64, eig_hi: f64) -> Self {
        self.eig_lo = eig_lo;
        self.eig_hi = eig_hi;
        self
    }

    pub fn with_cols(mut self, cols: usize) -> Self {
        self.cols = Some(cols);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidSpec("dimension must be positive".into()));
        }
        if !(self.eig_lo < self.eig_hi) {
            return Err(Error::InvalidSpec(format!("eig_lo {} must be < eig_hi {}", self.eig_lo, self.eig_hi)));
        }
        match self.kind {
            EnsembleKind::PositiveDefinite | EnsembleKind::Density if self.eig_lo <= 0.0 => {
                Err(Error::InvalidSpec(format!("eig_lo {} must be positive", self.eig_lo)))
            }
            EnsembleKind::NegativeDefinite if self.eig_hi >= 0.0 => {
                Err(Error::InvalidSpec(format!("eig_hi {} must be negative", self.eig_hi)))
            }
            EnsembleKind::Isometry if self.cols.unwrap_or(self.n) > self.n => Err(Error::InvalidSpec(format!(
                "isometry needs cols <= rows, got {} > {}",
                self.cols.unwrap_or(self.n),
                self.n
            ))),
            EnsembleKind::Contraction | EnsembleKind::Isometry if self.cols == Some(0) => {
                Err(Error::InvalidSpec("cols must be positive".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RandomMatrix {
    Hermitian(HermitianMatrix),
    Contraction(ContractionMatrix),
}

impl RandomMatrix {
    pub fn into_hermitian(self) -> Option<HermitianMatrix> {
        match self {
            RandomMatrix::Hermitian(h) => Some(h),
            RandomMatrix::Contraction(_) => None,
        }
    }

    pub fn into_contraction(self) -> Option<ContractionMatrix> {
        match self {
            RandomMatrix::Contraction(c) => Some(c),
            RandomMatrix::Hermitian(_) => None,
        }
    }
}

/// Deterministic draw from the ensemble described by `spec`.
pub fn random_matrix(spec: &RandomEnsembleSpec) -> Result<RandomMatrix> {
    spec.validate()?;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(spec.seed);
    let n = spec.n;
    let cols = spec.cols.unwrap_or(n);
    Ok(match spec.kind {
        EnsembleKind::Hermitian => RandomMatrix::Hermitian(random_hermitian(n, &mut rng)),
        EnsembleKind::PositiveDefinite => {
            RandomMatrix::Hermitian(random_positive_definite(n, spec.eig_lo, spec.eig_hi, &mut rng).into_hermitian())
        }
        EnsembleKind::NegativeDefinite => {
            RandomMatrix::Hermitian(random_negative_definite(n, spec.eig_lo, spec.eig_hi, &mut rng))
        }
        EnsembleKind::Density => {
            RandomMatrix::Hermitian(random_density_in(n, spec.eig_lo, spec.eig_hi, &mut rng).into_pd().into_hermitian())
        }
        EnsembleKind::Contraction => RandomMatrix::Contraction(random_contraction(n, cols, &mut rng)),
        EnsembleKind::Isometry => RandomMatrix::Contraction(random_isometry(n, cols, &mut rng)),
    })
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// i.i.d. standard complex Gaussian entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    // fill row-major so the stream order does not depend on storage layout
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_normal(rng);
        }
    }
    m
}

/// Gaussian Hermitian matrix `(G + G*)/2`.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianMatrix {
    HermitianMatrix::from_hermitian_parts(gaussian_matrix(n, n, rng))
}

/// Haar unitary from the phase-corrected QR of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let qr = gaussian_matrix(n, n, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for v in q.column_mut(k).iter_mut() {
            *v *= phase;
        }
    }
    q
}

/// `U diag(uniform[lo, hi]) U*` with Haar `U`.
pub fn random_with_spectrum<R: Rng + ?Sized>(n: usize, lo: f64, hi: f64, rng: &mut R) -> HermitianMatrix {
    let u = random_unitary(n, rng);
    let values: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
    let mut scaled = u.clone();
    for (k, v) in values.iter().enumerate() {
        scaled.column_mut(k).scale_mut(*v);
    }
    HermitianMatrix::from_hermitian_parts(scaled * u.adjoint())
}

pub fn random_positive_definite<R: Rng + ?Sized>(n: usize, lo: f64, hi: f64, rng: &mut R) -> PositiveDefiniteMatrix {
    assert!(lo > 0.0 && lo < hi);
    let u = random_unitary(n, rng);
    let values: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
    PositiveDefiniteMatrix::from_spectrum(u, values).expect("spectrum is bounded below by lo > 0")
}

pub fn random_negative_definite<R: Rng + ?Sized>(n: usize, lo: f64, hi: f64, rng: &mut R) -> HermitianMatrix {
    assert!(hi < 0.0 && lo < hi);
    random_with_spectrum(n, lo, hi, rng)
}

/// Density matrix with pre-normalization spectrum in `[0.1, 2]`.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityMatrix {
    random_density_in(n, 0.1, 2.0, rng)
}

fn random_density_in<R: Rng + ?Sized>(n: usize, lo: f64, hi: f64, rng: &mut R) -> DensityMatrix {
    let x = random_positive_definite(n, lo, hi, rng);
    DensityMatrix::normalized(&x).expect("normalized positive definite matrix")
}

/// Gaussian matrix rescaled to operator norm `1/(1 + 1e-6)`.
pub fn random_contraction<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ContractionMatrix {
    let g = gaussian_matrix(rows, cols, rng);
    let gram = HermitianMatrix::from_hermitian_parts(g.adjoint() * &g);
    let sigma = gram.eigh().expect("Gram matrix eigendecomposition").max_eigenvalue().sqrt();
    ContractionMatrix::new(g.unscale(sigma * (1.0 + 1e-6))).expect("rescaled matrix is a contraction")
}

/// First `cols` columns of a Haar unitary of size `rows`.
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ContractionMatrix {
    assert!(cols <= rows);
    let u = random_unitary(rows, rng);
    ContractionMatrix::new(u.columns(0, cols).into_owned()).expect("isometry is a contraction")
}
