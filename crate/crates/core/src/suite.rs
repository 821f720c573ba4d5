//! Named verification suites over `dims x q_grid` cells, reports, and
//! single-functional evaluation for the command line.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deformed::{exp_q, log_q, random_in_domain, Deformation};
use crate::error::{Error, Result};
use crate::functionals::{
    gibbs_objective, phi_multi, relative_functional, tsallis_entropy_functional, tsallis_relative_entropy,
    MultiTermInput, RelativeFunctionalInput,
};
use crate::inequalities::{
    corollary52_tally, golden_thompson_classical_tally, golden_thompson_deformed_tally, midpoint_curvature_tally,
    peierls_bogolyubov_tally, young_tally, CurvatureCase, CurvatureMap,
};
use crate::linalg::{
    random_contraction, random_isometry, random_positive_definite, read_matrix_file, trial_rng, ContractionMatrix,
    DensityMatrix, HermitianMatrix, PositiveDefiniteMatrix, TrialRng,
};
use crate::record::{Direction, Tally, Tolerances, VerificationRecord};
use crate::variational::{
    corollary32_tally, legendre_objective, lemma21_tally, prop25_tally, scalar_legendre_fenchel, theorem22_tally,
    theorem31_tally, theorem42_tallies, theorem43_tallies, VerifyOptions, LF_GRID,
};

/// Independent random instances per cell; the numeric oracle runs on the first.
pub const INSTANCES_PER_CELL: usize = 8;
/// Environment variable capping the worker threads (0 = all cores).
pub const THREADS_ENV: &str = "QTRACE_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Lemma21,
    Thm22,
    Prop25,
    Thm31,
    Cor32,
    Thm42,
    Thm43,
    ScalarLf,
    Young,
    PeierlsBogolyubov,
    GoldenThompson,
    Cor52,
    Curvature,
}

impl Suite {
    pub const ALL: [Suite; 13] = [
        Suite::Lemma21,
        Suite::Thm22,
        Suite::Prop25,
        Suite::Thm31,
        Suite::Cor32,
        Suite::Thm42,
        Suite::Thm43,
        Suite::ScalarLf,
        Suite::Young,
        Suite::PeierlsBogolyubov,
        Suite::GoldenThompson,
        Suite::Cor52,
        Suite::Curvature,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma21 => "lemma21",
            Suite::Thm22 => "thm22",
            Suite::Prop25 => "prop25",
            Suite::Thm31 => "thm31",
            Suite::Cor32 => "cor32",
            Suite::Thm42 => "thm42",
            Suite::Thm43 => "thm43",
            Suite::ScalarLf => "scalar_lf",
            Suite::Young => "young",
            Suite::PeierlsBogolyubov => "peierls_bogolyubov",
            Suite::GoldenThompson => "golden_thompson",
            Suite::Cor52 => "cor52",
            Suite::Curvature => "curvature",
        }
    }

    /// Whether the statements behind the suite cover `q`.
    pub fn covers(self, q: f64) -> bool {
        if q < 0.0 {
            return false;
        }
        let classical = Deformation::new(q).is_classical();
        match self {
            Suite::Lemma21 | Suite::Thm42 | Suite::Young => true,
            Suite::Cor32 => classical || (1.0..=2.0).contains(&q),
            Suite::GoldenThompson => classical || q < 1.0,
            Suite::Cor52 => q < 1.0 && !classical,
            Suite::Curvature => !CurvatureMap::applicable(Deformation::new(q)).is_empty(),
            _ => q <= 3.0,
        }
    }

    /// Expands `all` and parses the other names.
    pub fn parse_list<S: AsRef<str>>(names: &[S]) -> Result<Vec<Suite>> {
        let mut out = Vec::new();
        for name in names {
            if name.as_ref() == "all" {
                out.extend(Suite::ALL);
            } else {
                out.push(name.as_ref().parse()?);
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub dims: Vec<usize>,
    pub q_grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub suites: Vec<Suite>,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            dims: vec![2, 3, 4],
            q_grid: vec![0.0, 0.25, 0.5, 0.75, 0.999, 1.0, 1.001, 1.5, 2.0, 2.5, 3.0, 3.5],
            trials: 500,
            seed: 42,
            tolerances: Tolerances::default(),
            suites: Suite::ALL.to_vec(),
        }
    }
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::Config("dims must be non-empty and >= 1".into()));
        }
        if self.q_grid.is_empty() {
            return Err(Error::Config("q grid is empty".into()));
        }
        for &q in &self.q_grid {
            Deformation::try_new(q).map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.suites.is_empty() {
            return Err(Error::Config("no suite selected".into()));
        }
        let t = self.tolerances;
        if [t.eq_tol_scale, t.dir_slack, t.opt_tol_rel].iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Config("tolerances must be finite and non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl Summary {
    /// `skipped` sums the per-record skip counts.
    pub fn of(records: &[VerificationRecord]) -> Self {
        let passed = records.iter().filter(|r| r.pass).count();
        Self {
            total: records.len(),
            passed,
            failed: records.len() - passed,
            skipped: records.iter().map(|r| r.skipped).sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: TrialConfig,
    pub records: Vec<VerificationRecord>,
    pub summary: Summary,
    pub wall_time_seconds: f64,
}

#[derive(Serialize)]
struct Trailer<'a> {
    config: &'a TrialConfig,
    summary: Summary,
    wall_time_seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Config(format!("unknown format {other:?}, expected json or csv"))),
        }
    }
}

pub const CSV_HEADER: &str = "theorem,q,n,seed,closed_form,numeric_opt,worst_violation,trials,skipped,pass";

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    /// One JSON object per record, then the config/summary trailer.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        let trailer =
            Trailer { config: &self.config, summary: self.summary, wall_time_seconds: self.wall_time_seconds };
        out.push_str(&serde_json::to_string(&trailer).expect("summary serializes"));
        out.push('\n');
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let opt = r.numeric_opt.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.theorem, r.q, r.n, r.seed, r.closed_form, opt, r.worst_violation, r.trials, r.skipped, r.pass
            ));
        }
        out
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => self.to_json_lines(),
            ReportFormat::Csv => self.to_csv(),
        }
    }
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the `(suite, dim, q)` cell derived from the run seed.
pub fn cell_seed(seed: u64, suite: Suite, dim: usize, q: f64) -> u64 {
    let mut h = mix(seed);
    for b in suite.name().bytes() {
        h = mix(h ^ b as u64);
    }
    h = mix(h ^ dim as u64);
    mix(h ^ q.to_bits())
}

fn pd(n: usize, rng: &mut TrialRng) -> PositiveDefiniteMatrix {
    random_positive_definite(n, 0.2, 3.0, rng)
}

struct Cell {
    suite: Suite,
    dim: usize,
    q: f64,
    seed: u64,
    base: VerifyOptions,
}

impl Cell {
    fn opts(&self, instance: usize) -> VerifyOptions {
        let opts = VerifyOptions { seed: mix(self.seed ^ instance as u64), ..self.base };
        if instance == 0 && self.dim <= crate::variational::ORACLE_MAX_DIM {
            opts
        } else {
            opts.without_oracle()
        }
    }

    fn instance_rng(&self, instance: usize) -> TrialRng {
        trial_rng(self.seed, u64::MAX - instance as u64)
    }

    fn merged(&self, tag: &str, mut each: impl FnMut(usize, &VerifyOptions, &mut TrialRng) -> Tally) -> Tally {
        let mut total = Tally::new(tag, self.q, self.dim, self.seed);
        for i in 0..INSTANCES_PER_CELL {
            let opts = self.opts(i);
            let t = each(i, &opts, &mut self.instance_rng(i));
            if i == 0 {
                total.closed_form = t.closed_form;
                total.numeric_opt = t.numeric_opt;
            }
            total.merge(&t);
        }
        total
    }

    fn finish(&self, t: Tally) -> VerificationRecord {
        t.finish(self.base.tolerances.dir_slack)
    }

    fn skipped(&self, tag: &str) -> VerificationRecord {
        VerificationRecord::skipped(tag, self.q, self.dim, self.seed, self.base.trials)
    }

    fn run(&self) -> Vec<VerificationRecord> {
        if !self.suite.covers(self.q) {
            return vec![self.skipped(self.suite.name())];
        }
        let q = Deformation::new(self.q);
        let n = self.dim;
        match self.suite {
            Suite::Lemma21 => vec![self.finish(self.merged("lemma21", |_, o, rng| lemma21_tally(&pd(n, rng), q, o)))],
            Suite::Thm22 => vec![self.finish(self.merged("thm22", |_, o, rng| {
                let a = pd(n, rng);
                theorem22_tally(&a, &random_contraction(n, n, rng), q, o)
            }))],
            Suite::Prop25 => {
                let t = self.merged("prop25", |_, o, rng| {
                    let a = pd(n, rng);
                    let h = random_contraction(n, n, rng);
                    let l = crate::linalg::random_hermitian(n, rng).scale(0.3);
                    prop25_tally(&a, &h, &l, q, o)
                });
                if t.trials_run() == 0 && t.failures().is_empty() {
                    vec![self.skipped("prop25")]
                } else {
                    vec![self.finish(t)]
                }
            }
            Suite::Thm31 => vec![self.finish(self.merged("thm31", |_, o, rng| {
                let x = pd(n, rng);
                let a = pd(n + 1, rng);
                let h = random_contraction(n + 1, n, rng);
                match RelativeFunctionalInput::new(x, a, h, q) {
                    Ok(inp) => theorem31_tally(&inp, o),
                    Err(e) => failed_tally("thm31", self.q, n, o.seed, e),
                }
            }))],
            Suite::Cor32 => vec![self.finish(self.merged("cor32", |_, o, rng| {
                let x = pd(n, rng);
                corollary32_tally(&x, &pd(n, rng), q, o)
            }))],
            Suite::Thm42 => {
                let (mut primal, mut dual) = (Vec::new(), Vec::new());
                for i in 0..INSTANCES_PER_CELL {
                    let l = random_in_domain(n, q, &mut self.instance_rng(i));
                    let t = theorem42_tallies(&l, q, &self.opts(i));
                    primal.push(t.primal);
                    dual.push(t.dual);
                }
                vec![self.finish(self.fold("thm42_primal", primal)), self.finish(self.fold("thm42_dual", dual))]
            }
            Suite::Thm43 => {
                let (mut primal, mut dual) = (Vec::new(), Vec::new());
                for i in 0..INSTANCES_PER_CELL {
                    let rng = &mut self.instance_rng(i);
                    let y = pd(n + 1, rng);
                    let h = random_isometry(n + 1, n, rng);
                    let l = random_positive_definite(n, 0.05, 1.0, rng).into_hermitian();
                    let l = if self.q < 1.0 && !q.is_classical() { -&l } else { l };
                    match theorem43_tallies(&y, &h, &l, q, &self.opts(i)) {
                        Ok(t) => {
                            primal.push(t.primal);
                            dual.push(t.dual);
                        }
                        Err(e) => {
                            primal.push(failed_tally("thm43_primal", self.q, n, self.seed, e.clone()));
                            dual.push(failed_tally("thm43_dual", self.q, n, self.seed, e));
                        }
                    }
                }
                vec![self.finish(self.fold("thm43_primal", primal)), self.finish(self.fold("thm43_dual", dual))]
            }
            Suite::ScalarLf => vec![self.finish(self.merged("scalar_lf", |_, o, rng| scalar_lf_tally(q, n, o, rng)))],
            Suite::Young => vec![self.finish(self.merged("young", |_, o, _| young_tally(n, q, o)))],
            Suite::PeierlsBogolyubov => {
                vec![self.finish(self.merged("peierls_bogolyubov", |_, o, _| peierls_bogolyubov_tally(n, q, o)))]
            }
            Suite::GoldenThompson => vec![self.finish(self.merged("golden_thompson", |_, o, _| {
                if q.is_classical() {
                    golden_thompson_classical_tally(n, o)
                } else {
                    golden_thompson_deformed_tally(n, q, o)
                }
            }))],
            Suite::Cor52 => vec![self.finish(self.merged("cor52", |i, o, _| corollary52_tally(n, 1 + i % 2, q, o)))],
            Suite::Curvature => CurvatureMap::applicable(q)
                .into_iter()
                .map(|map| {
                    self.finish(self.merged(map.id(), |_, o, rng| match CurvatureCase::random(map, q, n, rng) {
                        Ok(case) => midpoint_curvature_tally(&case, o),
                        Err(e) => failed_tally(map.id(), self.q, n, o.seed, e),
                    }))
                })
                .collect(),
        }
    }

    fn fold(&self, tag: &str, parts: Vec<Tally>) -> Tally {
        let mut total = Tally::new(tag, self.q, self.dim, self.seed);
        if let Some(first) = parts.first() {
            total.closed_form = first.closed_form;
            total.numeric_opt = first.numeric_opt;
        }
        for p in &parts {
            total.merge(p);
        }
        total
    }
}

fn failed_tally(tag: &str, q: f64, n: usize, seed: u64, e: Error) -> Tally {
    let mut t = Tally::new(tag, q, n, seed);
    t.require(false, || e.to_string());
    t
}

/// Grid-plus-refinement optimum against `exp_q s` at random `s = log_q(lambda)`,
/// and the direction of the scalar objective at random `lambda`.
fn scalar_lf_tally(q: Deformation, n: usize, opts: &VerifyOptions, rng: &mut TrialRng) -> Tally {
    let mut tally = Tally::new("scalar_lf", q.q(), n, opts.seed);
    let direction = Direction::for_q(q.q());
    let count = (opts.trials / 10).max(1);
    for i in 0..count {
        let lambda = 10f64.powf(rng.random_range(-3.0..3.0));
        let s = match log_q(lambda, q) {
            Ok(s) if q.domain().contains(s) => s,
            _ => {
                tally.skip();
                continue;
            }
        };
        let want = exp_q(s, q).unwrap_or(f64::NAN);
        if i == 0 {
            tally.closed_form = want;
        }
        match scalar_legendre_fenchel(s, q, LF_GRID) {
            Ok(r) => tally.require((r.value - want).abs() <= 1e-8 * (1.0 + want.abs()), || {
                format!("optimum {} vs exp_q({s}) = {want}", r.value)
            }),
            Err(e) => tally.require(false, || e.to_string()),
        }
        for _ in 0..10 {
            let probe = 10f64.powf(rng.random_range(-4.0..4.0));
            match legendre_objective(probe, s, q) {
                Ok(v) => tally.observe(direction.sense().violation(v - want)),
                Err(_) => tally.skip(),
            }
        }
    }
    tally
}

fn thread_count() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Error::Config(format!("{THREADS_ENV}={v:?} is not a count"))),
        Err(_) => Ok(0),
    }
}

/// Runs every `(suite, dim, q)` cell and returns the records sorted by suite,
/// dimension and `q`.
pub fn run_suite(config: &TrialConfig) -> Result<SuiteReport> {
    config.validate()?;
    let start = Instant::now();
    let base =
        VerifyOptions { trials: config.trials, seed: config.seed, tolerances: config.tolerances, ..Default::default() };
    let mut suites = config.suites.clone();
    suites.sort();
    suites.dedup();
    let mut dims = config.dims.clone();
    dims.sort();
    dims.dedup();
    let mut qs = config.q_grid.clone();
    qs.sort_by(f64::total_cmp);
    qs.dedup();
    let cells: Vec<Cell> = suites
        .iter()
        .flat_map(|&suite| dims.iter().map(move |&dim| (suite, dim)))
        .flat_map(|(suite, dim)| {
            qs.iter().map(move |&q| Cell { suite, dim, q, seed: cell_seed(config.seed, suite, dim, q), base })
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let records: Vec<VerificationRecord> =
        pool.install(|| cells.par_iter().map(Cell::run).collect::<Vec<_>>()).into_iter().flatten().collect();

    let summary = Summary::of(&records);
    let config = TrialConfig { suites, dims, q_grid: qs, ..config.clone() };
    Ok(SuiteReport { config, records, summary, wall_time_seconds: start.elapsed().as_secs_f64() })
}

/// Parameters of [`eval_functional`].
#[derive(Debug, Clone, Default)]
pub struct EvalParams {
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub h: Vec<std::path::PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionalName {
    Tsallis,
    RelativeFunctional,
    Phi,
    GibbsObjective,
    TsallisEntropy,
}

impl FromStr for FunctionalName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "tsallis" => FunctionalName::Tsallis,
            "relative_functional" => FunctionalName::RelativeFunctional,
            "phi" => FunctionalName::Phi,
            "gibbs_objective" => FunctionalName::GibbsObjective,
            "tsallis_entropy" => FunctionalName::TsallisEntropy,
            other => return Err(Error::Config(format!("unknown functional {other:?}"))),
        })
    }
}

fn read_hermitian(path: &Path) -> Result<HermitianMatrix> {
    HermitianMatrix::new(read_matrix_file(path)?)
}

fn read_pd(path: &Path) -> Result<PositiveDefiniteMatrix> {
    PositiveDefiniteMatrix::new(read_hermitian(path)?)
}

fn read_contraction(path: &Path) -> Result<ContractionMatrix> {
    ContractionMatrix::new(read_matrix_file(path)?)
}

fn expect_files<P: AsRef<Path>>(name: &str, files: &[P], count: usize) -> Result<()> {
    if files.len() != count {
        return Err(Error::Config(format!("{name} takes {count} matrix file(s), got {}", files.len())));
    }
    Ok(())
}

fn need_q(params: &EvalParams) -> Result<Deformation> {
    let q = params.q.ok_or_else(|| Error::Config("missing --q".into()))?;
    Deformation::try_new(q)
}

/// Evaluates a named functional on matrices read from JSON files.
pub fn eval_functional<P: AsRef<Path>>(name: &str, files: &[P], params: &EvalParams) -> Result<f64> {
    let paths: Vec<&Path> = files.iter().map(AsRef::as_ref).collect();
    match name.parse::<FunctionalName>()? {
        FunctionalName::Tsallis => {
            expect_files(name, &paths, 2)?;
            let p = match (params.p, params.q) {
                (Some(p), _) => p,
                (None, Some(q)) => 2.0 - q,
                (None, None) => return Err(Error::Config("tsallis needs --p or --q".into())),
            };
            tsallis_relative_entropy(&read_pd(paths[0])?, &read_pd(paths[1])?, p)
        }
        FunctionalName::RelativeFunctional => {
            expect_files(name, &paths, 2)?;
            let (x, a) = (read_pd(paths[0])?, read_pd(paths[1])?);
            let q = need_q(params)?;
            let inp = match params.h.as_slice() {
                [] => RelativeFunctionalInput::square(x, a, q)?,
                [h] => RelativeFunctionalInput::new(x, a, read_contraction(h)?, q)?,
                _ => return Err(Error::Config("relative_functional takes one --h".into())),
            };
            relative_functional(&inp)
        }
        FunctionalName::Phi => {
            if paths.is_empty() {
                return Err(Error::Config("phi needs at least one matrix file".into()));
            }
            let a = paths.iter().map(|p| read_pd(p)).collect::<Result<Vec<_>>>()?;
            let k = a.len();
            let h = if params.h.is_empty() {
                let n = a[0].dim();
                vec![ContractionMatrix::scaled_identity(n, 1.0 / (k as f64).sqrt()); k]
            } else {
                params.h.iter().map(|p| read_contraction(p)).collect::<Result<Vec<_>>>()?
            };
            phi_multi(&MultiTermInput::new(a, h, need_q(params)?)?)
        }
        FunctionalName::GibbsObjective => {
            expect_files(name, &paths, 2)?;
            let x = DensityMatrix::new(read_pd(paths[0])?)?;
            gibbs_objective(&x, &read_hermitian(paths[1])?, need_q(params)?)
        }
        FunctionalName::TsallisEntropy => {
            expect_files(name, &paths, 1)?;
            Ok(tsallis_entropy_functional(&read_pd(paths[0])?, need_q(params)?))
        }
    }
}

/// Formats with 15 significant digits.
pub fn format_value(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let digits = 14 - v.abs().log10().floor() as i32;
    if (0..=20).contains(&digits) {
        let s = format!("{v:.*}", digits as usize);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{v:.14e}")
    }
}
