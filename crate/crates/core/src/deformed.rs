//! Deformed (q-) logarithm and exponential, scalar and spectral.
//!
//! `log_q x = (x^(q-1) - 1)/(q-1)` on `x > 0` and `exp_q` is its inverse,
//! defined on `x > -1/(q-1)` for `q > 1`, on `x < -1/(q-1)` for `q < 1` and on
//! the whole line for `q = 1`, where both reduce to the classical functions.
//! Within `1e-8` of `q = 1` the classical branch is used.
//!
//! Both power forms are evaluated through `expm1`/`ln_1p`, so the deformed
//! functions stay accurate to full precision as `q -> 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{random_hermitian, HermitianMatrix, PositiveDefiniteMatrix, SpectralDecomposition, TrialRng};

/// `|q - 1|` below which the classical `exp`/`log` are used.
pub const Q_ONE_TOL: f64 = 1e-8;
/// Minimum distance to the `exp_q` domain bound.
pub const DOMAIN_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// q < 1
    BelowOne,
    /// q = 1 within [`Q_ONE_TOL`]
    Classical,
    /// 1 < q <= 2
    OneToTwo,
    /// 2 < q <= 3
    TwoToThree,
    /// q > 3
    AboveThree,
}

/// Which side of `-1/(q-1)` the argument of `exp_q` must lie on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainSide {
    /// q < 1: arguments strictly below the bound.
    UpperBound,
    /// q > 1: arguments strictly above the bound.
    LowerBound,
    /// q = 1: no restriction.
    Unbounded,
}

/// The deformation parameter `q` with its regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deformation {
    q: f64,
    regime: Regime,
}

impl Deformation {
    /// Panics on a non-finite `q`; see [`Deformation::try_new`].
    pub fn new(q: f64) -> Self {
        Self::try_new(q).expect("deformation parameter must be finite")
    }

    pub fn try_new(q: f64) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::domain(format!("deformation parameter q = {q} is not finite")));
        }
        let regime = if (q - 1.0).abs() <= Q_ONE_TOL {
            Regime::Classical
        } else if q < 1.0 {
            Regime::BelowOne
        } else if q <= 2.0 {
            Regime::OneToTwo
        } else if q <= 3.0 {
            Regime::TwoToThree
        } else {
            Regime::AboveThree
        };
        Ok(Self { q, regime })
    }

    /// `q = 2 - p` for the Tsallis entropy parameter `p`.
    pub fn from_entropy_parameter(p: f64) -> Self {
        Self::new(2.0 - p)
    }

    pub fn q(self) -> f64 {
        self.q
    }

    /// `2 - q`, the exponent carried by `X` in every trace functional.
    pub fn p(self) -> f64 {
        2.0 - self.q
    }

    pub fn regime(self) -> Regime {
        self.regime
    }

    pub fn is_classical(self) -> bool {
        self.regime == Regime::Classical
    }

    pub fn domain(self) -> ExpQDomain {
        ExpQDomain::for_q(self)
    }

    pub fn log(self, x: f64) -> Result<f64> {
        log_q(x, self)
    }

    pub fn exp(self, x: f64) -> Result<f64> {
        exp_q(x, self)
    }

    /// `d/dx log_q x = x^(q-2)`.
    pub fn log_derivative(self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::domain(format!("log_q' undefined at x = {x}")));
        }
        Ok(((self.q - 2.0) * x.ln()).exp())
    }
}

/// The half-line on which `exp_q` is defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpQDomain {
    pub q: Deformation,
    /// `-1/(q-1)`, infinite for `q = 1`.
    pub bound: f64,
    pub side: DomainSide,
}

impl ExpQDomain {
    pub fn for_q(q: Deformation) -> Self {
        if q.is_classical() {
            return Self { q, bound: f64::INFINITY, side: DomainSide::Unbounded };
        }
        let bound = -1.0 / (q.q() - 1.0);
        let side = if q.q() < 1.0 { DomainSide::UpperBound } else { DomainSide::LowerBound };
        Self { q, bound, side }
    }

    /// Distance from `x` to the bound, positive on the admissible side.
    pub fn distance(&self, x: f64) -> f64 {
        match self.side {
            DomainSide::UpperBound => self.bound - x,
            DomainSide::LowerBound => x - self.bound,
            DomainSide::Unbounded => f64::INFINITY,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.distance(x) > DOMAIN_MARGIN
    }
}

/// Outcome of [`check_exp_q_domain`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainReport {
    pub inside: bool,
    pub min_eig: f64,
    pub max_eig: f64,
    /// Distance of the worst eigenvalue to the bound (infinite for q = 1).
    pub margin: f64,
    pub bound: f64,
}

pub fn log_q(x: f64, q: Deformation) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("log_q requires x > 0, got {x}")));
    }
    if q.is_classical() {
        return Ok(x.ln());
    }
    let a = q.q() - 1.0;
    Ok((a * x.ln()).exp_m1() / a)
}

pub fn exp_q(x: f64, q: Deformation) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!("exp_q requires a finite argument, got {x}")));
    }
    if q.is_classical() {
        return Ok(x.exp());
    }
    let domain = q.domain();
    if !domain.contains(x) {
        let rel = if domain.side == DomainSide::LowerBound { ">" } else { "<" };
        return Err(Error::domain(format!(
            "exp_q with q = {} requires x {rel} {} (margin {DOMAIN_MARGIN:e}), got {x}",
            q.q(),
            domain.bound
        )));
    }
    let a = q.q() - 1.0;
    Ok(((a * x).ln_1p() / a).exp())
}

/// Spectral `log_q(A)`.
pub fn log_q_matrix(a: &PositiveDefiniteMatrix, q: Deformation) -> HermitianMatrix {
    a.map(|x| log_q(x, q).expect("spectrum of a positive definite matrix is positive"))
}

/// Spectral `exp_q(L)`; fails with the offending eigenvalue and the bound.
pub fn exp_q_matrix(l: &HermitianMatrix, q: Deformation) -> Result<PositiveDefiniteMatrix> {
    exp_q_spectral(&l.eigh()?, q)
}

/// `exp_q` of a matrix given by its decomposition.
pub fn exp_q_spectral(d: &SpectralDecomposition, q: Deformation) -> Result<PositiveDefiniteMatrix> {
    let values = d.eigenvalues().iter().map(|&x| exp_q(x, q)).collect::<Result<Vec<_>>>()?;
    PositiveDefiniteMatrix::from_spectrum(d.eigenvectors().clone(), values)
}

pub fn check_exp_q_domain(l: &HermitianMatrix, q: Deformation) -> Result<DomainReport> {
    Ok(domain_report(&l.eigh()?, q))
}

pub fn domain_report(d: &SpectralDecomposition, q: Deformation) -> DomainReport {
    let domain = q.domain();
    let (min_eig, max_eig) = (d.min_eigenvalue(), d.max_eigenvalue());
    let margin = match domain.side {
        DomainSide::UpperBound => domain.distance(max_eig),
        DomainSide::LowerBound => domain.distance(min_eig),
        DomainSide::Unbounded => f64::INFINITY,
    };
    DomainReport { inside: margin > DOMAIN_MARGIN, min_eig, max_eig, margin, bound: domain.bound }
}

/// Random Hermitian matrix with spectrum inside the `exp_q` domain: `c + e^S`
/// above a lower bound, `c - e^S` below an upper bound, with the bound `c`
/// clipped to `[-2, 2]`, and `S` itself when `q = 1`.
pub fn random_in_domain(n: usize, q: Deformation, rng: &mut TrialRng) -> HermitianMatrix {
    let domain = q.domain();
    let s = random_hermitian(n, rng).scale(0.5);
    let e = s.eigh().expect("Hermitian input").map(f64::exp);
    match domain.side {
        DomainSide::LowerBound => e.shift(domain.bound.max(-2.0)),
        DomainSide::UpperBound => (-&e).shift(domain.bound.min(2.0)),
        DomainSide::Unbounded => s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_positive_definite, trial_rng};
    use proptest::prelude::*;

    fn d(q: f64) -> Deformation {
        Deformation::new(q)
    }

    #[test]
    fn regimes() {
        assert_eq!(d(0.5).regime(), Regime::BelowOne);
        assert_eq!(d(1.0 + 5e-9).regime(), Regime::Classical);
        assert_eq!(d(1.001).regime(), Regime::OneToTwo);
        assert_eq!(d(2.0).regime(), Regime::OneToTwo);
        assert_eq!(d(3.0).regime(), Regime::TwoToThree);
        assert_eq!(d(3.5).regime(), Regime::AboveThree);
        assert!(Deformation::try_new(f64::NAN).is_err());
    }

    #[test]
    fn log_q_examples() {
        assert_eq!(log_q(1.0, d(0.5)).unwrap(), 0.0);
        assert!((log_q(4.0, d(2.0)).unwrap() - 3.0).abs() < 1e-15);
        assert!((log_q(4.0, d(0.5)).unwrap() - 1.0).abs() < 1e-15);
        assert!((log_q(std::f64::consts::E, d(1.0)).unwrap() - 1.0).abs() < 1e-15);
        assert!(log_q(0.0, d(1.5)).is_err());
        assert!(log_q(-1.0, d(1.5)).is_err());
    }

    #[test]
    fn exp_q_examples() {
        assert!((exp_q(0.0, d(2.7)).unwrap() - 1.0).abs() < 1e-15);
        assert!((exp_q(3.0, d(2.0)).unwrap() - 4.0).abs() < 1e-14);
        assert!((exp_q(1.0, d(1.0)).unwrap() - std::f64::consts::E).abs() < 1e-15);
        let err = exp_q(-2.0, d(2.0)).unwrap_err();
        assert!(err.to_string().contains("-1"), "{err}");
        // boundary excluded
        assert!(exp_q(-1.0, d(2.0)).is_err());
        assert!(exp_q(2.0, d(0.5)).is_err());
        assert!(exp_q(1.99, d(0.5)).is_ok());
    }

    #[test]
    fn matrix_examples() {
        let i = PositiveDefiniteMatrix::identity(3);
        assert!(log_q_matrix(&i, d(0.3)).max_abs_entry() < 1e-15);
        let a = PositiveDefiniteMatrix::diagonal(&[1.0, 4.0]).unwrap();
        assert!(log_q_matrix(&a, d(2.0)).max_abs_diff(&HermitianMatrix::diagonal(&[0.0, 3.0])) < 1e-14);
        let e = exp_q_matrix(&HermitianMatrix::zeros(2), d(0.3)).unwrap();
        assert!(e.as_hermitian().max_abs_diff(&HermitianMatrix::identity(2)) < 1e-15);
        let e = exp_q_matrix(&HermitianMatrix::diagonal(&[3.0, 0.0]), d(2.0)).unwrap();
        assert!(e.as_hermitian().max_abs_diff(&HermitianMatrix::diagonal(&[4.0, 1.0])) < 1e-14);
        assert!(matches!(exp_q_matrix(&HermitianMatrix::diagonal(&[-2.0, 0.0]), d(2.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn matrix_round_trip() {
        let a = random_positive_definite(3, 0.1, 2.0, &mut trial_rng(2, 0));
        let back = exp_q_matrix(&log_q_matrix(&a, d(1.5)), d(1.5)).unwrap();
        assert!(back.as_hermitian().max_abs_diff(a.as_hermitian()) < 1e-9);
    }

    #[test]
    fn domain_reports() {
        let r = check_exp_q_domain(&HermitianMatrix::diagonal(&[-0.5]), d(2.0)).unwrap();
        assert!(r.inside);
        assert!((r.margin - 0.5).abs() < 1e-15);
        assert!(!check_exp_q_domain(&HermitianMatrix::diagonal(&[-1.0]), d(2.0)).unwrap().inside);
        let any = HermitianMatrix::diagonal(&[-1e6, 1e6]);
        let r = check_exp_q_domain(&any, d(1.0)).unwrap();
        assert!(r.inside && r.margin.is_infinite());
        let r = check_exp_q_domain(&HermitianMatrix::diagonal(&[0.5, 1.5]), d(0.5)).unwrap();
        assert!(r.inside && (r.margin - 0.5).abs() < 1e-15);
    }

    #[test]
    fn proof_identities() {
        // log_q(y/x) = log_q y + y^(q-1) log_q(1/x);  log_q(1/x) = -x^(1-q) log_q x
        for &q in &[0.0, 0.3, 0.7, 1.0, 1.3, 2.0, 2.5, 3.0, 3.5] {
            let q = d(q);
            for &(x, y) in &[(0.3, 2.0), (5.0, 0.7), (1.7, 1.7), (0.01, 40.0)] {
                let lhs = log_q(y / x, q).unwrap();
                let rhs = log_q(y, q).unwrap() + y.powf(q.q() - 1.0) * log_q(1.0 / x, q).unwrap();
                assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()), "q={} x={x} y={y}", q.q());
                let lhs = log_q(1.0 / x, q).unwrap();
                let rhs = -x.powf(1.0 - q.q()) * log_q(x, q).unwrap();
                assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
            }
        }
    }

    proptest! {
        #[test]
        fn inverse_pair(lx in -6.0f64..6.0, qi in 0usize..8) {
            let q = d([0.0, 0.3, 0.7, 1.0, 1.3, 2.0, 2.5, 3.0][qi]);
            let x = 10f64.powf(lx);
            let y = log_q(x, q).unwrap();
            // relative condition number of exp_q at y = log_q x
            let cond = if q.is_classical() {
                1.0 + y.abs()
            } else {
                1.0 + (1.0 - x.powf(1.0 - q.q())).abs() / (q.q() - 1.0).abs()
            };
            match exp_q(y, q) {
                Ok(back) => prop_assert!((back - x).abs() <= 1e-12 * cond * x, "x={} back={}", x, back),
                // log_q x landed within the domain margin of the bound
                Err(_) => prop_assert!(q.domain().distance(y) <= DOMAIN_MARGIN),
            }
        }

        #[test]
        fn continuity_at_one(x in -5.0f64..5.0, y in 0.01f64..100.0, sign in prop::bool::ANY) {
            let q = d(if sign { 1.0 + 1e-6 } else { 1.0 - 1e-6 });
            let e = exp_q(x, q).unwrap();
            prop_assert!((e - x.exp()).abs() <= 1e-4 * (1.0 + x.exp()));
            let l = log_q(y, q).unwrap();
            prop_assert!((l - y.ln()).abs() <= 1e-4 * (1.0 + y.ln().abs()));
        }

        #[test]
        fn log_q_increasing(mut xs in prop::collection::vec(1e-3f64..1e3, 2..20), q in -1.0f64..4.0) {
            xs.sort_by(f64::total_cmp);
            xs.dedup();
            let q = d(q);
            let ys: Vec<f64> = xs.iter().map(|&x| log_q(x, q).unwrap()).collect();
            prop_assert!(ys.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
