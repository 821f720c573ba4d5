//! One verifier per variational representation.
//!
//! Each verifier builds a [`VariationalProblem`], then checks the objective at
//! the closed-form optimizer, the direction of the inequality at random
//! feasible points, first-order stationarity and, for `n <= 3`, agreement with
//! [`numeric_optimum`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::objectives::{entropy_dual_objective, gibbs_value, log_trace_exp, relative_dual_objective, young_objective};
use super::optimizer::{gap, numeric_optimum, projected_gradient_norm, OptimizerSettings};
use super::problem::{Candidate, FeasibleSet, Objective, VariationalProblem};
use crate::deformed::{check_exp_q_domain, exp_q, exp_q_matrix, log_q, log_q_matrix, Deformation};
use crate::error::{Error, Result};
use crate::functionals::{
    relative_functional, tsallis_entropy_functional, tsallis_relative_entropy, RelativeFunctionalInput,
};
use crate::linalg::{
    random_hermitian, trial_rng, ContractionMatrix, DensityMatrix, HermitianMatrix, PositiveDefiniteMatrix, TrialRng,
    ISOMETRY_TOL,
};
use crate::record::{Direction, Tally, Tolerances, VerificationRecord};

/// Largest dimension on which the numeric oracle and stationarity check run.
pub const ORACLE_MAX_DIM: usize = 3;
/// Bound on the projected finite-difference gradient at the optimizer.
pub const STATIONARITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Random feasible points per instance.
    pub trials: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    /// `None` disables the numeric oracle.
    pub optimizer: Option<OptimizerSettings>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { trials: 500, seed: 0, tolerances: Tolerances::default(), optimizer: Some(OptimizerSettings::default()) }
    }
}

impl VerifyOptions {
    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn without_oracle(mut self) -> Self {
        self.optimizer = None;
        self
    }
}

fn local_point(problem: &VariationalProblem, rng: &mut TrialRng) -> Option<Candidate> {
    let base = problem.closed_form_optimizer.hermitian();
    let n = problem.dim;
    let mut g = random_hermitian(n, rng);
    if problem.feasible_set.is_simplex() {
        g = g.shift(-g.trace() / n as f64);
    }
    let mut t = rng.random_range(0.0..1.0) * (1.0 + base.max_abs_entry()) / g.max_abs_entry().max(1e-300);
    for _ in 0..40 {
        let m = base + &g.scale(t);
        if let Ok(c) = problem.feasible_set.wrap(m) {
            return Some(c);
        }
        t *= 0.5;
    }
    None
}

fn global_point(problem: &VariationalProblem, rng: &mut TrialRng) -> Option<Candidate> {
    let scale = rng.random_range(0.1..1.0);
    let s = random_hermitian(problem.dim, rng).scale(scale);
    problem.feasible_set.parametrize(&s).ok()
}

/// Runs the equality, direction, stationarity and oracle checks of one
/// problem into a [`Tally`].
pub fn check_problem(problem: &VariationalProblem, q: f64, opts: &VerifyOptions) -> Tally {
    let n = problem.dim;
    let closed = problem.closed_form_value;
    let tol = opts.tolerances;
    let mut tally = Tally::new(problem.theorem_tag.clone(), q, n, opts.seed);
    tally.closed_form = closed;

    match problem.evaluate(&problem.closed_form_optimizer) {
        Ok(v) => tally.require(tol.equal(n, v, closed), || {
            format!("objective at optimizer {v} differs from closed form {closed}")
        }),
        Err(e) => tally.require(false, || format!("objective undefined at optimizer: {e}")),
    }

    for t in 0..opts.trials {
        let mut rng = trial_rng(opts.seed, t as u64);
        let point = if t % 2 == 0 { global_point(problem, &mut rng) } else { local_point(problem, &mut rng) };
        match point.map(|c| problem.evaluate(&c)) {
            Some(Ok(v)) => tally.observe(gap(problem.direction, v, closed)),
            _ => tally.skip(),
        }
    }

    if n <= ORACLE_MAX_DIM {
        let h = opts.optimizer.map_or(OptimizerSettings::default().fd_step, |s| s.fd_step);
        match projected_gradient_norm(problem, &problem.closed_form_optimizer, h) {
            Ok(g) => tally.require(g <= STATIONARITY_TOL * (1.0 + closed.abs()), || {
                format!("gradient norm {g:e} at the optimizer")
            }),
            Err(e) => tally.require(false, || format!("stationarity probe failed: {e}")),
        }
        if let Some(settings) = opts.optimizer {
            let settings = OptimizerSettings { seed: opts.seed, ..settings };
            match numeric_optimum(problem, &settings) {
                Ok(opt) => {
                    tally.numeric_opt = Some(opt.value);
                    tally.require(tol.oracle_agrees(opt.value, closed), || {
                        format!("numeric optimum {} vs closed form {closed}", opt.value)
                    });
                }
                Err(e) => tally.require(false, || format!("numeric oracle: {e}")),
            }
        }
    }
    tally
}

fn finish(tally: Tally, opts: &VerifyOptions) -> VerificationRecord {
    tally.finish(opts.tolerances.dir_slack)
}

fn failed(tag: &str, q: f64, n: usize, opts: &VerifyOptions, why: Error) -> Tally {
    let mut t = Tally::new(tag, q, n, opts.seed);
    t.require(false, || why.to_string());
    t
}

fn pd_objective(m: HermitianMatrix, q: Deformation) -> Objective<'static> {
    Box::new(move |c| young_objective(c.state()?, &m, q))
}

/// `Tr Y = max/min over X > 0 of Tr X - Tr X^(2-q)(log_q X - log_q Y)`.
pub fn lemma21_problem(y: &PositiveDefiniteMatrix, q: Deformation) -> Result<VariationalProblem<'static>> {
    VariationalProblem::new(
        "lemma21",
        pd_objective(log_q_matrix(y, q), q),
        Direction::for_q(q.q()),
        FeasibleSet::PdCone,
        Candidate::State(y.clone()),
        y.trace(),
    )
}

pub fn lemma21_tally(y: &PositiveDefiniteMatrix, q: Deformation, opts: &VerifyOptions) -> Tally {
    match lemma21_problem(y, q) {
        Ok(p) => check_problem(&p, q.q(), opts),
        Err(e) => failed("lemma21", q.q(), y.dim(), opts, e),
    }
}

pub fn verify_lemma21(y: &PositiveDefiniteMatrix, q: Deformation, opts: &VerifyOptions) -> VerificationRecord {
    finish(lemma21_tally(y, q, opts), opts)
}

/// Problem whose optimum over the cone is `Tr exp_q(M)`, attained at `exp_q(M)`.
fn exp_q_problem(tag: &str, m: HermitianMatrix, q: Deformation) -> Result<VariationalProblem<'static>> {
    let report = check_exp_q_domain(&m, q)?;
    if !report.inside {
        return Err(Error::domain(format!(
            "argument spectrum [{}, {}] outside the exp_q domain (bound {})",
            report.min_eig, report.max_eig, report.bound
        )));
    }
    let y = exp_q_matrix(&m, q)?;
    let value = y.trace();
    VariationalProblem::new(
        tag,
        pd_objective(m, q),
        Direction::for_q(q.q()),
        FeasibleSet::PdCone,
        Candidate::State(y),
        value,
    )
}

/// `Tr exp_q(H* log_q(A) H)` as an optimum over `X > 0`.
pub fn theorem22_problem(
    a: &PositiveDefiniteMatrix,
    h: &ContractionMatrix,
    q: Deformation,
) -> Result<VariationalProblem<'static>> {
    exp_q_problem("thm22", h.sandwich(&log_q_matrix(a, q))?, q)
}

pub fn theorem22_tally(
    a: &PositiveDefiniteMatrix,
    h: &ContractionMatrix,
    q: Deformation,
    opts: &VerifyOptions,
) -> Tally {
    match theorem22_problem(a, h, q) {
        Ok(p) => check_problem(&p, q.q(), opts),
        Err(e) => failed("thm22", q.q(), h.cols(), opts, e),
    }
}

pub fn verify_theorem22(
    a: &PositiveDefiniteMatrix,
    h: &ContractionMatrix,
    q: Deformation,
    opts: &VerifyOptions,
) -> VerificationRecord {
    finish(theorem22_tally(a, h, q, opts), opts)
}

/// `Tr exp_q(L + H* log_q(A) H)` as an optimum over `X > 0`; `Ok(None)` when
/// `L + H* log_q(A) H` is outside the `exp_q` domain.
pub fn prop25_problem(
    a: &PositiveDefiniteMatrix,
    h: &ContractionMatrix,
    l: &HermitianMatrix,
    q: Deformation,
) -> Result<Option<VariationalProblem<'static>>> {
    let m = l + &h.sandwich(&log_q_matrix(a, q))?;
    if !check_exp_q_domain(&m, q)?.inside {
        return Ok(None);
    }
    exp_q_problem("prop25", m, q).map(Some)
}

pub fn prop25_tally(
    a: &PositiveDefiniteMatrix,
    h: &ContractionMatrix,
    l: &HermitianMatrix,
    q: Deformation,
    opts: &VerifyOptions,
) -> Tally {
    match prop25_problem(a, h, l, q) {
        Ok(Some(p)) => check_problem(&p, q.q(), opts),
        Ok(None) => {
            let mut t = Tally::new("prop25", q.q(), h.cols(), opts.seed);
            t.skip();
            t
        }
        Err(e) => failed("prop25", q.q(), h.cols(), opts, e),
    }
}

pub fn verify_prop25(
    a: &PositiveDefiniteMatrix,
    h: &ContractionMatrix,
    l: &HermitianMatrix,
    q: Deformation,
    opts: &VerifyOptions,
) -> VerificationRecord {
    let tally = prop25_tally(a, h, l, q, opts);
    if tally.trials_run() == 0 && tally.skipped_count() > 0 && tally.failures().is_empty() {
        return VerificationRecord::skipped("prop25", q.q(), h.cols(), opts.seed, 1);
    }
    finish(tally, opts)
}

/// `Tr X^(2-q)(log_q X - H* log_q(A) H)` as an optimum of
/// `G(L) = Tr X + Tr X^(2-q) L - Tr exp_q(L + H* log_q(A) H)` over admissible `L`.
pub fn theorem31_problem(inp: &RelativeFunctionalInput) -> Result<VariationalProblem<'static>> {
    let q = inp.q;
    let z = inp.pulled_back_log();
    let value = relative_functional(inp)?;
    let l0 = &log_q_matrix(&inp.x, q) - &z;
    let set = FeasibleSet::exp_q_domain(q, &z);
    let x = inp.x.clone();
    VariationalProblem::new(
        "thm31",
        Box::new(move |c| relative_dual_objective(&x, &z, c.operator(), q)),
        Direction::for_q(q.q()),
        set,
        Candidate::Operator(l0),
        value,
    )
}

pub fn theorem31_tally(inp: &RelativeFunctionalInput, opts: &VerifyOptions) -> Tally {
    match theorem31_problem(inp) {
        Ok(p) => check_problem(&p, inp.q.q(), opts),
        Err(e) => failed("thm31", inp.q.q(), inp.x.dim(), opts, e),
    }
}

pub fn verify_theorem31(
    x: &PositiveDefiniteMatrix,
    a: &PositiveDefiniteMatrix,
    h: &ContractionMatrix,
    q: Deformation,
    opts: &VerifyOptions,
) -> VerificationRecord {
    let tally = match RelativeFunctionalInput::new(x.clone(), a.clone(), h.clone(), q) {
        Ok(inp) => theorem31_tally(&inp, opts),
        Err(e) => failed("thm31", q.q(), x.dim(), opts, e),
    };
    finish(tally, opts)
}

/// The `H = I` case for `q` in `[1, 2]`, additionally checking that the
/// optimum is `D_(2-q)(X|A)`.
pub fn corollary32_tally(
    x: &PositiveDefiniteMatrix,
    a: &PositiveDefiniteMatrix,
    q: Deformation,
    opts: &VerifyOptions,
) -> Tally {
    let n = x.dim();
    if !(1.0..=2.0).contains(&q.q()) {
        return failed("cor32", q.q(), n, opts, Error::domain("requires q in [1, 2]"));
    }
    let inp = match RelativeFunctionalInput::square(x.clone(), a.clone(), q) {
        Ok(inp) => inp,
        Err(e) => return failed("cor32", q.q(), n, opts, e),
    };
    let mut tally = theorem31_tally(&inp, opts);
    tally.theorem = "cor32".into();
    match tsallis_relative_entropy(x, a, q.p()) {
        Ok(d) => {
            let closed = tally.closed_form;
            tally.require(opts.tolerances.equal(n, closed, d), || format!("optimum {closed} differs from D_p = {d}"));
        }
        Err(e) => tally.require(false, || e.to_string()),
    }
    tally
}

pub fn verify_corollary32(
    x: &PositiveDefiniteMatrix,
    a: &PositiveDefiniteMatrix,
    q: Deformation,
    opts: &VerifyOptions,
) -> VerificationRecord {
    finish(corollary32_tally(x, a, q, opts), opts)
}

/// Primal and dual halves of a Gibbs-type representation.
#[derive(Debug, Clone)]
pub struct PrimalDual<T> {
    pub primal: T,
    pub dual: T,
}

impl PrimalDual<VerificationRecord> {
    pub fn into_records(self) -> [VerificationRecord; 2] {
        [self.primal, self.dual]
    }
}

/// Gibbs state `exp_q(M) / Tr exp_q(M)`.
fn gibbs_state(m: &HermitianMatrix, q: Deformation) -> Result<DensityMatrix> {
    DensityMatrix::normalized(&exp_q_matrix(m, q)?)
}

/// `log_q Tr exp_q(L + Z)` as an optimum over density matrices of
/// `Tr X^(2-q) L - Tr X^(2-q)(log_q X - Z)`.
fn gibbs_primal(
    tag: &str,
    l: &HermitianMatrix,
    z: &HermitianMatrix,
    q: Deformation,
) -> Result<VariationalProblem<'static>> {
    let m = l + z;
    let value = log_trace_exp(&m, q)?;
    let x_star = gibbs_state(&m, q)?.into_pd();
    VariationalProblem::new(
        tag,
        Box::new(move |c| gibbs_value(c.state()?, &m, q)),
        Direction::for_q(q.q()),
        FeasibleSet::DensitySimplex,
        Candidate::State(x_star),
        value,
    )
}

/// Primal: `log_q Tr exp_q L` over density matrices. Dual: `Tr X^(2-q) log_q X`
/// over admissible `L` for the primal optimizer `X`.
pub fn theorem42_problems(l: &HermitianMatrix, q: Deformation) -> Result<PrimalDual<VariationalProblem<'static>>> {
    let n = l.dim();
    let zero = HermitianMatrix::zeros(n);
    let primal = gibbs_primal("thm42_primal", l, &zero, q)?;
    let x = primal.closed_form_optimizer.state()?.clone();
    let value = tsallis_entropy_functional(&x, q);
    let l_star = log_q_matrix(&x, q);
    let set = FeasibleSet::exp_q_domain(q, &zero);
    let dual = VariationalProblem::new(
        "thm42_dual",
        Box::new(move |c| entropy_dual_objective(&x, &zero, c.operator(), q)),
        Direction::for_q(q.q()),
        set,
        Candidate::Operator(l_star),
        value,
    )?;
    Ok(PrimalDual { primal, dual })
}

pub fn theorem42_tallies(l: &HermitianMatrix, q: Deformation, opts: &VerifyOptions) -> PrimalDual<Tally> {
    match theorem42_problems(l, q) {
        Ok(p) => {
            PrimalDual { primal: check_problem(&p.primal, q.q(), opts), dual: check_problem(&p.dual, q.q(), opts) }
        }
        Err(e) => PrimalDual {
            primal: failed("thm42_primal", q.q(), l.dim(), opts, e.clone()),
            dual: failed("thm42_dual", q.q(), l.dim(), opts, e),
        },
    }
}

pub fn verify_theorem42(l: &HermitianMatrix, q: Deformation, opts: &VerifyOptions) -> PrimalDual<VerificationRecord> {
    let t = theorem42_tallies(l, q, opts);
    PrimalDual { primal: finish(t.primal, opts), dual: finish(t.dual, opts) }
}

fn check_sign(l: &HermitianMatrix, q: Deformation) -> Result<()> {
    let d = l.eigh()?;
    let tol = 1e-12 * (1.0 + l.max_abs_entry());
    if q.q() < 1.0 && !q.is_classical() {
        if d.max_eigenvalue() > tol {
            return Err(Error::SignConstraintViolated {
                q: q.q(),
                detail: format!("L must be <= 0, max eigenvalue {}", d.max_eigenvalue()),
            });
        }
    } else if d.min_eigenvalue() < -tol {
        return Err(Error::SignConstraintViolated {
            q: q.q(),
            detail: format!("L must be >= 0, min eigenvalue {}", d.min_eigenvalue()),
        });
    }
    Ok(())
}

/// A point of the dual maximizer family `log_q(cX) - Z`, with `c` chosen so
/// that the point satisfies the sign constraint with margin `0.1`.
pub fn theorem43_dual_optimizer(
    x: &PositiveDefiniteMatrix,
    z: &HermitianMatrix,
    q: Deformation,
) -> Result<HermitianMatrix> {
    let zd = z.eigh()?;
    let c = if q.q() < 1.0 && !q.is_classical() {
        exp_q(zd.min_eigenvalue() - 0.1, q)? / x.max_eig()
    } else {
        exp_q(zd.max_eigenvalue() + 0.1, q)? / x.min_eig()
    };
    let lc = x.map(|v| log_q(c * v, q).expect("positive argument"));
    Ok(&lc - z)
}

/// Primal and dual problems for an isometry `H`; the dual is posed at the primal
/// optimizer `X`.
pub fn theorem43_problems(
    y: &PositiveDefiniteMatrix,
    h: &ContractionMatrix,
    l: &HermitianMatrix,
    q: Deformation,
) -> Result<PrimalDual<VariationalProblem<'static>>> {
    if !h.is_isometry() {
        let dev = h.gram().max_abs_diff(&HermitianMatrix::identity(h.cols()));
        return Err(Error::domain(format!("H*H differs from I by {dev:e} > {ISOMETRY_TOL:e}")));
    }
    check_sign(l, q)?;
    let z = h.sandwich(&log_q_matrix(y, q))?;
    let primal = gibbs_primal("thm43_primal", l, &z, q)?;
    let x = primal.closed_form_optimizer.state()?.clone();
    let inp = RelativeFunctionalInput::new(x.clone(), y.clone(), h.clone(), q)?;
    let value = relative_functional(&inp)?;
    let l_star = theorem43_dual_optimizer(&x, &z, q)?;
    let set = FeasibleSet::sign_constrained(q, l.dim());
    let dual = VariationalProblem::new(
        "thm43_dual",
        Box::new(move |c| entropy_dual_objective(&x, &z, c.operator(), q)),
        Direction::for_q(q.q()),
        set,
        Candidate::Operator(l_star),
        value,
    )?;
    Ok(PrimalDual { primal, dual })
}

pub fn theorem43_tallies(
    y: &PositiveDefiniteMatrix,
    h: &ContractionMatrix,
    l: &HermitianMatrix,
    q: Deformation,
    opts: &VerifyOptions,
) -> Result<PrimalDual<Tally>> {
    let p = match theorem43_problems(y, h, l, q) {
        Ok(p) => p,
        Err(e @ Error::SignConstraintViolated { .. }) => return Err(e),
        Err(e) => {
            return Ok(PrimalDual {
                primal: failed("thm43_primal", q.q(), l.dim(), opts, e.clone()),
                dual: failed("thm43_dual", q.q(), l.dim(), opts, e),
            })
        }
    };
    Ok(PrimalDual { primal: check_problem(&p.primal, q.q(), opts), dual: check_problem(&p.dual, q.q(), opts) })
}

pub fn verify_theorem43(
    y: &PositiveDefiniteMatrix,
    h: &ContractionMatrix,
    l: &HermitianMatrix,
    q: Deformation,
    opts: &VerifyOptions,
) -> Result<PrimalDual<VerificationRecord>> {
    let t = theorem43_tallies(y, h, l, q, opts)?;
    Ok(PrimalDual { primal: finish(t.primal, opts), dual: finish(t.dual, opts) })
}
