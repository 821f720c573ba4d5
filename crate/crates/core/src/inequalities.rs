//! Trace inequalities: tracial Young, Peierls-Bogolyubov, Golden-Thompson
//! (deformed and classical), the supporting-hyperplane bound for the
//! multivariate `phi`, and midpoint curvature checks.
//!
//! Every check returns a signed gap whose contracted sign is given by a
//! [`Sense`]; the `*_tally` functions sample random instances.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::deformed::{check_exp_q_domain, exp_q_matrix, log_q, log_q_matrix, random_in_domain, Deformation};
use crate::error::{Error, Result};
use crate::functionals::{phi_multi, trace_power_with, MultiTermInput};
use crate::linalg::{
    frechet_derivative_with, random_contraction, random_hermitian, random_isometry, random_negative_definite,
    random_positive_definite, random_unitary, trial_rng, ContractionMatrix, HermitianMatrix, PositiveDefiniteMatrix,
    TrialRng, PD_FLOOR,
};
use crate::record::{Sense, Tally};
use crate::variational::VerifyOptions;

/// Spectrum box of the negative definite samples for Golden-Thompson.
pub const GT_SPECTRUM: (f64, f64) = (-3.0, -0.05);
/// Tolerance of the tangency `B = A` in the supporting-hyperplane bound.
pub const TANGENCY_TOL: f64 = 1e-8;
/// Distance from `q = 1` used by the Golden-Thompson limit check.
pub const GT_LIMIT_OFFSET: f64 = 1e-4;
/// Allowed difference between the deformed and classical gaps near `q = 1`.
pub const GT_LIMIT_TOL: f64 = 1e-2;

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(format!("{a}x{a} and {b}x{b} operands")));
    }
    Ok(())
}

/// `Tr X^p Y^(1-p) - (p Tr X + (1-p) Tr Y)`.
pub fn tracial_young(x: &PositiveDefiniteMatrix, y: &PositiveDefiniteMatrix, p: f64) -> Result<f64> {
    same_dim(x.dim(), y.dim())?;
    let cross = trace_power_with(x, p, y.power(1.0 - p).as_hermitian());
    Ok(cross - (p * x.trace() + (1.0 - p) * y.trace()))
}

/// `<= 0` on `[0, 1]`, `>= 0` outside.
pub fn young_sense(p: f64) -> Sense {
    if (0.0..=1.0).contains(&p) {
        Sense::NonPositive
    } else {
        Sense::NonNegative
    }
}

/// Direction of the Peierls-Bogolyubov gap: `>=` for `q < 2`, `<=` for
/// `q > 2`, equality at `q = 2` where both cases apply.
pub fn pb_sense(q: Deformation) -> Sense {
    if q.q() == 2.0 {
        Sense::Zero
    } else if q.q() < 2.0 {
        Sense::NonNegative
    } else {
        Sense::NonPositive
    }
}

/// `[log_q Tr exp_q(A+B) - log_q Tr exp_q A] - (Tr exp_q A)^(q-2) Tr (exp_q A)^(2-q) B`.
///
/// `Ok(None)` when `A` or `A + B` is outside the `exp_q` domain.
pub fn peierls_bogolyubov(a: &HermitianMatrix, b: &HermitianMatrix, q: Deformation) -> Result<Option<f64>> {
    same_dim(a.dim(), b.dim())?;
    let apb = a + b;
    if !check_exp_q_domain(a, q)?.inside || !check_exp_q_domain(&apb, q)?.inside {
        return Ok(None);
    }
    let ea = exp_q_matrix(a, q)?;
    let ta = ea.trace();
    let tab = exp_q_matrix(&apb, q)?.trace();
    let linear = (q.p() * -ta.ln()).exp() * trace_power_with(&ea, q.p(), b);
    Ok(Some(log_q(tab, q)? - log_q(ta, q)? - linear))
}

fn require_negative_definite(a: &HermitianMatrix) -> Result<()> {
    let max_eig = a.eigh()?.max_eigenvalue();
    if max_eig > -PD_FLOOR {
        return Err(Error::NotNegativeDefinite { max_eig, floor: PD_FLOOR });
    }
    Ok(())
}

/// `Tr exp_q(A+B) - Tr exp_q(A)^(2-q) (A(q-1) + exp_q B)` for negative
/// definite `A`, `B` and `q` in `[0, 1)`.
pub fn golden_thompson_deformed(a: &HermitianMatrix, b: &HermitianMatrix, q: Deformation) -> Result<f64> {
    same_dim(a.dim(), b.dim())?;
    if !(0.0..1.0).contains(&q.q()) || q.is_classical() {
        return Err(Error::domain(format!("deformed Golden-Thompson needs q in [0, 1), got {}", q.q())));
    }
    require_negative_definite(a)?;
    require_negative_definite(b)?;
    let lhs = exp_q_matrix(&(a + b), q)?.trace();
    let ea = exp_q_matrix(a, q)?;
    let inner = &a.scale(q.q() - 1.0) + exp_q_matrix(b, q)?.as_hermitian();
    Ok(lhs - trace_power_with(&ea, q.p(), &inner))
}

/// `Tr exp(A+B) - Tr exp(A) exp(B)`.
pub fn golden_thompson_classical(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    same_dim(a.dim(), b.dim())?;
    let one = Deformation::new(1.0);
    let lhs = exp_q_matrix(&(a + b), one)?.trace();
    let ea = exp_q_matrix(a, one)?;
    Ok(lhs - ea.as_hermitian().trace_with(exp_q_matrix(b, one)?.as_hermitian()))
}

/// Deformed and classical Golden-Thompson gaps on a Hermitian pair shifted
/// to be negative definite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenThompsonLimit {
    pub deformed: f64,
    pub classical_shifted: f64,
    pub classical: f64,
}

impl GoldenThompsonLimit {
    pub fn difference(&self) -> f64 {
        (self.deformed - self.classical_shifted).abs()
    }

    /// Shifting by scalars multiplies the classical gap by a positive factor.
    pub fn sign_preserved(&self, slack: f64) -> bool {
        (self.classical <= slack) == (self.classical_shifted <= slack)
    }
}

pub fn golden_thompson_limit(a: &HermitianMatrix, b: &HermitianMatrix, q: Deformation) -> Result<GoldenThompsonLimit> {
    let shift = |m: &HermitianMatrix| -> Result<HermitianMatrix> { Ok(m.shift(-(m.eigh()?.max_eigenvalue() + 1.0))) };
    let (sa, sb) = (shift(a)?, shift(b)?);
    Ok(GoldenThompsonLimit {
        deformed: golden_thompson_deformed(&sa, &sb, q)?,
        classical_shifted: golden_thompson_classical(&sa, &sb)?,
        classical: golden_thompson_classical(a, b)?,
    })
}

/// `phi(B) - Tr exp_q(M)^(2-q) sum_j H_j* (D log_q(A_j)[B_j]) H_j` with
/// `M = sum_i H_i* log_q(A_i) H_i`, for `q` in `[0, 1)`.
pub fn corollary52_bound(b_list: &[PositiveDefiniteMatrix], inp: &MultiTermInput) -> Result<f64> {
    let q = inp.q;
    if !(0.0..1.0).contains(&q.q()) || q.is_classical() {
        return Err(Error::domain(format!("supporting-hyperplane bound needs q in [0, 1), got {}", q.q())));
    }
    if b_list.len() != inp.k() {
        return Err(Error::DimensionMismatch(format!("{} matrices B for k = {}", b_list.len(), inp.k())));
    }
    let lhs = phi_multi(&MultiTermInput::new(b_list.to_vec(), inp.h.clone(), q)?)?;
    let mut direction = HermitianMatrix::zeros(inp.dim());
    for ((a, b), h) in inp.a.iter().zip(b_list).zip(&inp.h) {
        same_dim(a.dim(), b.dim())?;
        let d = frechet_derivative_with(a.spectral(), b.as_hermitian(), |x| log_q(x, q), |x| q.log_derivative(x))?;
        direction = &direction + &h.sandwich(&d)?;
    }
    let em = exp_q_matrix(&inp.argument(), q)?;
    Ok(lhs - trace_power_with(&em, q.p(), &direction))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CurvatureMap {
    /// `A -> Tr exp_q(H* log_q(A) H)`, concave for `0 <= q < 1`.
    #[serde(rename = "cor23_i")]
    ContractionBelowOne,
    /// Same map, concave for `1 <= q <= 2`.
    #[serde(rename = "cor23_ii")]
    ContractionOneToTwo,
    /// Same map, convex for `2 < q <= 3`.
    #[serde(rename = "cor23_iii")]
    ContractionTwoToThree,
    /// `A -> Tr exp_q(L + H* log_q(A) H)`, `L > 0`: concave on `[1, 2]`,
    /// convex on `(2, 3]`.
    #[serde(rename = "cor26_plusL")]
    PlusL,
    /// `A -> Tr exp_q(-L + H* log_q(A) H)`, `L > 0`: concave on `[0, 1)`.
    #[serde(rename = "cor26_minusL")]
    MinusL,
    /// `A -> Tr exp(L + H* log(A) H)`, `L` Hermitian: concave.
    #[serde(rename = "cor27")]
    Classical,
    /// `A -> Tr exp_q(L + H* log_r(A) H)`, `2 <= q <= r <= 3`, `L > 0`: convex.
    #[serde(rename = "prop28")]
    MixedExponents,
    /// `(A_1, A_2) -> Tr exp_q(sum H_i* log_q(A_i) H_i)`: jointly concave on `[0, 1)`.
    #[serde(rename = "cor51")]
    Multivariate,
}

impl CurvatureMap {
    pub const ALL: [CurvatureMap; 8] = [
        CurvatureMap::ContractionBelowOne,
        CurvatureMap::ContractionOneToTwo,
        CurvatureMap::ContractionTwoToThree,
        CurvatureMap::PlusL,
        CurvatureMap::MinusL,
        CurvatureMap::Classical,
        CurvatureMap::MixedExponents,
        CurvatureMap::Multivariate,
    ];

    pub fn id(self) -> &'static str {
        match self {
            CurvatureMap::ContractionBelowOne => "cor23_i",
            CurvatureMap::ContractionOneToTwo => "cor23_ii",
            CurvatureMap::ContractionTwoToThree => "cor23_iii",
            CurvatureMap::PlusL => "cor26_plusL",
            CurvatureMap::MinusL => "cor26_minusL",
            CurvatureMap::Classical => "cor27",
            CurvatureMap::MixedExponents => "prop28",
            CurvatureMap::Multivariate => "cor51",
        }
    }

    /// The asserted curvature at `q`, or `None` when no claim is made there.
    pub fn expected(self, q: Deformation) -> Option<Curvature> {
        let q = if q.is_classical() { 1.0 } else { q.q() };
        let concave = Some(Curvature::Concave);
        let convex = Some(Curvature::Convex);
        match self {
            CurvatureMap::ContractionBelowOne | CurvatureMap::MinusL | CurvatureMap::Multivariate => {
                (0.0..1.0).contains(&q).then_some(Curvature::Concave)
            }
            CurvatureMap::ContractionOneToTwo => (1.0..=2.0).contains(&q).then_some(Curvature::Concave),
            CurvatureMap::ContractionTwoToThree => (q > 2.0 && q <= 3.0).then_some(Curvature::Convex),
            CurvatureMap::PlusL => {
                if (1.0..=2.0).contains(&q) {
                    concave
                } else if q > 2.0 && q <= 3.0 {
                    convex
                } else {
                    None
                }
            }
            CurvatureMap::Classical => (q == 1.0).then_some(Curvature::Concave),
            CurvatureMap::MixedExponents => (2.0..=3.0).contains(&q).then_some(Curvature::Convex),
        }
    }

    pub fn applicable(q: Deformation) -> Vec<CurvatureMap> {
        Self::ALL.into_iter().filter(|m| m.expected(q).is_some()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Curvature {
    Concave,
    Convex,
}

impl Curvature {
    /// Contracted sign of `f(mid) - (f(P) + f(Q))/2`.
    pub fn sense(self) -> Sense {
        match self {
            Curvature::Concave => Sense::NonNegative,
            Curvature::Convex => Sense::NonPositive,
        }
    }
}

/// A map with a curvature claim and its fixed data.
#[derive(Debug, Clone)]
pub struct CurvatureCase {
    pub map: CurvatureMap,
    pub q: Deformation,
    /// Exponent of the inner logarithm; equals `q` except for `prop28`.
    pub r: Deformation,
    pub h: Vec<ContractionMatrix>,
    pub l: HermitianMatrix,
    pub expected: Curvature,
}

impl CurvatureCase {
    pub fn new(
        map: CurvatureMap,
        q: Deformation,
        r: Deformation,
        h: Vec<ContractionMatrix>,
        l: HermitianMatrix,
    ) -> Result<Self> {
        let expected = map
            .expected(q)
            .ok_or_else(|| Error::domain(format!("no curvature claim for {} at q = {}", map.id(), q.q())))?;
        let k = if map == CurvatureMap::Multivariate { 2 } else { 1 };
        if h.len() != k {
            return Err(Error::DimensionMismatch(format!("{} needs {k} contractions", map.id())));
        }
        let n = h[0].cols();
        if h.iter().any(|hi| hi.cols() != n || hi.rows() != n) || l.dim() != n {
            return Err(Error::DimensionMismatch("contractions and L must be n x n".into()));
        }
        match map {
            CurvatureMap::MixedExponents => {
                if !(q.q() <= r.q() && r.q() <= 3.0) {
                    return Err(Error::domain(format!("needs 2 <= q <= r <= 3, got q = {}, r = {}", q.q(), r.q())));
                }
            }
            _ if r != q => return Err(Error::domain("r differs from q outside prop28")),
            _ => {}
        }
        let needs_pd_l = matches!(map, CurvatureMap::PlusL | CurvatureMap::MinusL | CurvatureMap::MixedExponents);
        if needs_pd_l && l.eigh()?.min_eigenvalue() <= PD_FLOOR {
            return Err(Error::domain(format!("{} needs L positive definite", map.id())));
        }
        if map == CurvatureMap::Multivariate {
            MultiTermInput::new(vec![PositiveDefiniteMatrix::identity(n); 2], h.clone(), q)?;
        }
        Ok(Self { map, q, r, h, l, expected })
    }

    /// Draws the fixed data of `map` at `q` (`r` uniform on `[q, 3]` for `prop28`).
    pub fn random(map: CurvatureMap, q: Deformation, n: usize, rng: &mut TrialRng) -> Result<Self> {
        let h = match map {
            CurvatureMap::Multivariate => isometry_split(n, 2, rng),
            _ => vec![random_contraction(n, n, rng)],
        };
        let l = match map {
            CurvatureMap::PlusL | CurvatureMap::MinusL | CurvatureMap::MixedExponents => {
                random_positive_definite(n, 0.1, 2.0, rng).into_hermitian()
            }
            CurvatureMap::Classical => random_hermitian(n, rng),
            _ => HermitianMatrix::zeros(n),
        };
        let r = if map == CurvatureMap::MixedExponents { Deformation::new(rng.random_range(q.q()..=3.0)) } else { q };
        Self::new(map, q, r, h, l)
    }

    pub fn dim(&self) -> usize {
        self.l.dim()
    }

    pub fn arity(&self) -> usize {
        self.h.len()
    }

    /// The map at a tuple of positive definite arguments.
    pub fn evaluate(&self, args: &[PositiveDefiniteMatrix]) -> Result<f64> {
        if args.len() != self.arity() {
            return Err(Error::DimensionMismatch(format!("{} arguments for arity {}", args.len(), self.arity())));
        }
        let mut m = match self.map {
            CurvatureMap::MinusL => -&self.l,
            _ => self.l.clone(),
        };
        for (a, h) in args.iter().zip(&self.h) {
            m = &m + &h.sandwich(&log_q_matrix(a, self.r))?;
        }
        Ok(exp_q_matrix(&m, self.q)?.trace())
    }

    /// `f((P+Q)/2) - (f(P) + f(Q))/2`.
    pub fn midpoint_gap(&self, p: &[PositiveDefiniteMatrix], q: &[PositiveDefiniteMatrix]) -> Result<f64> {
        let mid = p
            .iter()
            .zip(q)
            .map(|(a, b)| PositiveDefiniteMatrix::new((a.as_hermitian() + b.as_hermitian()).scale(0.5)))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.evaluate(&mid)? - 0.5 * (self.evaluate(p)? + self.evaluate(q)?))
    }
}

/// Splits a `kn x n` isometry into `k` blocks with `sum H_i* H_i = I`.
pub fn isometry_split(n: usize, k: usize, rng: &mut TrialRng) -> Vec<ContractionMatrix> {
    let v = random_isometry(k * n, n, rng);
    (0..k)
        .map(|i| ContractionMatrix::new(v.matrix().rows(i * n, n).into_owned()).expect("block of an isometry"))
        .collect()
}

fn random_pd(n: usize, rng: &mut TrialRng) -> PositiveDefiniteMatrix {
    random_positive_definite(n, 0.1, 2.0, rng)
}

/// Midpoint test of `case` on `trials` random argument pairs; for the
/// multivariate map also checks degree-one homogeneity.
pub fn midpoint_curvature_tally(case: &CurvatureCase, opts: &VerifyOptions) -> Tally {
    let n = case.dim();
    let mut tally = Tally::new(case.map.id(), case.q.q(), n, opts.seed);
    let sense = case.expected.sense();
    for t in 0..opts.trials {
        let mut rng = trial_rng(opts.seed, t as u64);
        let p: Vec<_> = (0..case.arity()).map(|_| random_pd(n, &mut rng)).collect();
        let q: Vec<_> = (0..case.arity()).map(|_| random_pd(n, &mut rng)).collect();
        match case.midpoint_gap(&p, &q) {
            Ok(g) => tally.observe(sense.violation(g)),
            Err(_) => tally.skip(),
        }
        if case.map == CurvatureMap::Multivariate {
            let s = rng.random_range(0.1..10.0);
            let scaled: Result<Vec<_>> = p.iter().map(|a| a.scale(s)).collect();
            if let (Ok(base), Ok(scaled)) = (case.evaluate(&p), scaled.and_then(|v| case.evaluate(&v))) {
                tally.require((scaled - s * base).abs() <= 1e-9 * scaled.abs(), || {
                    format!("phi(tA) = {scaled} but t phi(A) = {}", s * base)
                });
            }
        }
    }
    tally
}

pub fn midpoint_curvature_check(case: &CurvatureCase, opts: &VerifyOptions) -> crate::record::VerificationRecord {
    midpoint_curvature_tally(case, opts).finish(opts.tolerances.dir_slack)
}

/// Random `n x n` pairs for tracial Young at `p = 2 - q`, plus the `X = Y`
/// equality.
pub fn young_tally(n: usize, q: Deformation, opts: &VerifyOptions) -> Tally {
    let p = q.p();
    let sense = young_sense(p);
    let mut tally = Tally::new("young", q.q(), n, opts.seed);
    for t in 0..opts.trials {
        let mut rng = trial_rng(opts.seed, t as u64);
        let x = random_pd(n, &mut rng);
        let y = random_pd(n, &mut rng);
        match tracial_young(&x, &y, p) {
            Ok(g) => tally.observe(sense.violation(g)),
            Err(_) => tally.skip(),
        }
        if t == 0 {
            let g = tracial_young(&x, &x, p).unwrap_or(f64::NAN);
            let tol = opts.tolerances.eq_tol(n, x.trace());
            tally.require(g.abs() <= tol, || format!("Young gap at X = Y is {g:e}"));
        }
    }
    tally
}

/// Admissible pair for the Peierls-Bogolyubov inequality: half the trials
/// draw `A` and `A + B` independently inside the domain, half perturb `A`.
fn pb_pair(n: usize, q: Deformation, rng: &mut TrialRng, local: bool) -> (HermitianMatrix, HermitianMatrix) {
    let a = random_in_domain(n, q, rng);
    let b = if local {
        random_hermitian(n, rng).scale(rng.random_range(0.0..0.3))
    } else {
        &random_in_domain(n, q, rng) - &a
    };
    (a, b)
}

pub fn peierls_bogolyubov_tally(n: usize, q: Deformation, opts: &VerifyOptions) -> Tally {
    let sense = pb_sense(q);
    let mut tally = Tally::new("peierls_bogolyubov", q.q(), n, opts.seed);
    for t in 0..opts.trials {
        let mut rng = trial_rng(opts.seed, t as u64);
        let (a, b) = pb_pair(n, q, &mut rng, t % 2 == 1);
        match peierls_bogolyubov(&a, &b, q) {
            Ok(Some(g)) => tally.observe(sense.violation(g)),
            _ => tally.skip(),
        }
        if t == 0 {
            let g = peierls_bogolyubov(&a, &HermitianMatrix::zeros(n), q).ok().flatten().unwrap_or(f64::NAN);
            tally.require(g.abs() <= 1e-12, || format!("gap at B = 0 is {g:e}"));
        }
    }
    tally
}

pub fn golden_thompson_deformed_tally(n: usize, q: Deformation, opts: &VerifyOptions) -> Tally {
    let mut tally = Tally::new("golden_thompson", q.q(), n, opts.seed);
    let (lo, hi) = GT_SPECTRUM;
    for t in 0..opts.trials {
        let mut rng = trial_rng(opts.seed, t as u64);
        let a = random_negative_definite(n, lo, hi, &mut rng);
        let b = random_negative_definite(n, lo, hi, &mut rng);
        match golden_thompson_deformed(&a, &b, q) {
            Ok(g) => tally.observe(Sense::NonPositive.violation(g)),
            Err(_) => tally.skip(),
        }
    }
    tally
}

/// Classical Golden-Thompson on Hermitian pairs, with the commuting equality
/// and, for `n <= 3`, the limit of the deformed gap at `q = 1 - 1e-4`.
pub fn golden_thompson_classical_tally(n: usize, opts: &VerifyOptions) -> Tally {
    let mut tally = Tally::new("golden_thompson", 1.0, n, opts.seed);
    let near_one = Deformation::new(1.0 - GT_LIMIT_OFFSET);
    let slack = opts.tolerances.dir_slack;
    for t in 0..opts.trials {
        let mut rng = trial_rng(opts.seed, t as u64);
        let a = random_hermitian(n, &mut rng);
        let b = random_hermitian(n, &mut rng);
        match golden_thompson_classical(&a, &b) {
            Ok(g) => tally.observe(Sense::NonPositive.violation(g)),
            Err(_) => tally.skip(),
        }
        if t == 0 {
            let u = random_unitary(n, &mut rng);
            let da =
                HermitianMatrix::diagonal(&(0..n).map(|i| i as f64 * 0.5 - 1.0).collect::<Vec<_>>()).conjugate_by(&u);
            let db =
                HermitianMatrix::diagonal(&(0..n).map(|i| 0.7 - i as f64 * 0.3).collect::<Vec<_>>()).conjugate_by(&u);
            let g = golden_thompson_classical(&da, &db).unwrap_or(f64::NAN);
            let tol = opts.tolerances.eq_tol(n, 10.0);
            tally.require(g.abs() <= tol, || format!("commuting gap {g:e}"));
        }
        if n <= 3 && t < 20 {
            match golden_thompson_limit(&a, &b, near_one) {
                Ok(lim) => {
                    tally.require(lim.difference() <= GT_LIMIT_TOL, || {
                        format!("gap at q = 1 - 1e-4 is {} vs classical {}", lim.deformed, lim.classical_shifted)
                    });
                    tally.require(lim.sign_preserved(slack), || "shift changed the classical gap sign".into());
                }
                Err(e) => tally.require(false, || e.to_string()),
            }
        }
    }
    tally
}

/// Random instances of the supporting-hyperplane bound with `k` terms, each
/// with the tangency at `B = A`.
pub fn corollary52_tally(n: usize, k: usize, q: Deformation, opts: &VerifyOptions) -> Tally {
    let mut tally = Tally::new("cor52", q.q(), n, opts.seed);
    for t in 0..opts.trials {
        let mut rng = trial_rng(opts.seed, t as u64);
        let h = isometry_split(n, k, &mut rng);
        let a: Vec<_> = (0..k).map(|_| random_pd(n, &mut rng)).collect();
        let b: Vec<_> = (0..k).map(|_| random_pd(n, &mut rng)).collect();
        let inp = match MultiTermInput::new(a.clone(), h, q) {
            Ok(inp) => inp,
            Err(_) => {
                tally.skip();
                continue;
            }
        };
        match corollary52_bound(&b, &inp) {
            Ok(g) => tally.observe(Sense::NonPositive.violation(g)),
            Err(_) => tally.skip(),
        }
        match corollary52_bound(&a, &inp) {
            Ok(g) => {
                let scale = phi_multi(&inp).map_or(1.0, |v| 1.0 + v.abs());
                tally.require(g.abs() <= TANGENCY_TOL * scale, || format!("tangency gap {g:e}"));
            }
            Err(e) => tally.require(false, || e.to_string()),
        }
    }
    tally
}
