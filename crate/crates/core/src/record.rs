//! Verification outcomes and the tolerances they are judged against.

use serde::{Deserialize, Serialize};

/// Default scale of the equality tolerance `eq_tol = scale * n * (1 + |value|)`.
pub const EQ_TOL_SCALE: f64 = 1e-10;
/// Default slack on inequality directions.
pub const DIR_SLACK: f64 = 1e-9;
/// Default relative agreement between the numeric oracle and a closed form.
pub const OPT_TOL_REL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub eq_tol_scale: f64,
    pub dir_slack: f64,
    pub opt_tol_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { eq_tol_scale: EQ_TOL_SCALE, dir_slack: DIR_SLACK, opt_tol_rel: OPT_TOL_REL }
    }
}

impl Tolerances {
    pub fn eq_tol(&self, n: usize, value: f64) -> f64 {
        self.eq_tol_scale * n as f64 * (1.0 + value.abs())
    }

    pub fn equal(&self, n: usize, value: f64, reference: f64) -> bool {
        (value - reference).abs() <= self.eq_tol(n, reference)
    }

    pub fn oracle_agrees(&self, numeric: f64, closed_form: f64) -> bool {
        (numeric - closed_form).abs() <= self.opt_tol_rel * (1.0 + closed_form.abs())
    }
}

/// Whether a closed-form value is the maximum or the minimum of its objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Max,
    Min,
}

impl Direction {
    /// Max for `q <= 2`, min for `q > 2`.
    pub fn for_q(q: f64) -> Self {
        if q <= 2.0 {
            Direction::Max
        } else {
            Direction::Min
        }
    }

    /// Sign contract on `objective - optimum`.
    pub fn sense(self) -> Sense {
        match self {
            Direction::Max => Sense::NonPositive,
            Direction::Min => Sense::NonNegative,
        }
    }

    /// `true` if `candidate` improves on `incumbent`.
    pub fn better(self, candidate: f64, incumbent: f64) -> bool {
        match self {
            Direction::Max => candidate > incumbent,
            Direction::Min => candidate < incumbent,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Direction::Max => 1.0,
            Direction::Min => -1.0,
        }
    }
}

/// Contracted sign of an inequality gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    NonPositive,
    NonNegative,
    /// Both directions hold, i.e. equality.
    Zero,
}

impl Sense {
    /// How far `gap` is on the wrong side; `<= 0` means the contract holds.
    pub fn violation(self, gap: f64) -> f64 {
        match self {
            Sense::NonPositive => gap,
            Sense::NonNegative => -gap,
            Sense::Zero => gap.abs(),
        }
    }
}

/// One theorem-check outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub theorem: String,
    pub q: f64,
    pub n: usize,
    pub seed: u64,
    pub closed_form: f64,
    /// `null` when the numeric oracle was not run for this cell.
    pub numeric_opt: Option<f64>,
    /// Largest signed violation of the direction contract over all trials.
    pub worst_violation: f64,
    pub trials: usize,
    pub skipped: usize,
    pub pass: bool,
}

impl VerificationRecord {
    /// A cell that was not run because its parameters are outside the
    /// hypothesis of the theorem.
    pub fn skipped(theorem: impl Into<String>, q: f64, n: usize, seed: u64, requested: usize) -> Self {
        Self {
            theorem: theorem.into(),
            q,
            n,
            seed,
            closed_form: 0.0,
            numeric_opt: None,
            worst_violation: 0.0,
            trials: 0,
            skipped: requested.max(1),
            pass: true,
        }
    }

    pub fn is_skipped(&self) -> bool {
        self.trials == 0 && self.skipped > 0
    }
}

/// Accumulates per-trial outcomes into a [`VerificationRecord`].
///
/// Aggregation is max/count only, so trials may be folded in any order.
#[derive(Debug, Clone)]
pub struct Tally {
    pub theorem: String,
    pub q: f64,
    pub n: usize,
    pub seed: u64,
    pub closed_form: f64,
    pub numeric_opt: Option<f64>,
    worst: f64,
    trials: usize,
    skipped: usize,
    failures: Vec<String>,
}

impl Tally {
    pub fn new(theorem: impl Into<String>, q: f64, n: usize, seed: u64) -> Self {
        Self {
            theorem: theorem.into(),
            q,
            n,
            seed,
            closed_form: 0.0,
            numeric_opt: None,
            worst: f64::NEG_INFINITY,
            trials: 0,
            skipped: 0,
            failures: Vec::new(),
        }
    }

    pub fn observe(&mut self, violation: f64) {
        self.trials += 1;
        if violation > self.worst || violation.is_nan() {
            self.worst = violation;
        }
    }

    pub fn skip(&mut self) {
        self.skipped += 1;
    }

    /// Records a failed side condition (equality, oracle, stationarity).
    pub fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn merge(&mut self, other: &Tally) {
        if other.worst > self.worst || other.worst.is_nan() {
            self.worst = other.worst;
        }
        self.trials += other.trials;
        self.skipped += other.skipped;
        self.failures.extend(other.failures.iter().cloned());
    }

    pub fn worst_violation(&self) -> f64 {
        if self.worst == f64::NEG_INFINITY {
            0.0
        } else {
            self.worst
        }
    }

    pub fn trials_run(&self) -> usize {
        self.trials
    }

    pub fn skipped_count(&self) -> usize {
        self.skipped
    }

    pub fn failures(&self) -> &[String] {
        &self.failures
    }

    pub fn finish(self, dir_slack: f64) -> VerificationRecord {
        let worst = self.worst_violation();
        let direction_ok = self.trials == 0 || worst <= dir_slack;
        let pass = direction_ok && self.failures.is_empty() && !worst.is_nan();
        VerificationRecord {
            theorem: self.theorem,
            q: self.q,
            n: self.n,
            seed: self.seed,
            closed_form: self.closed_form,
            numeric_opt: self.numeric_opt,
            worst_violation: worst,
            trials: self.trials,
            skipped: self.skipped,
            pass,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sense_violations() {
        assert_eq!(Sense::NonPositive.violation(-1.0), -1.0);
        assert_eq!(Sense::NonNegative.violation(-1.0), 1.0);
        assert_eq!(Sense::Zero.violation(-1e-3), 1e-3);
    }

    #[test]
    fn direction_rule() {
        assert_eq!(Direction::for_q(0.5), Direction::Max);
        assert_eq!(Direction::for_q(2.0), Direction::Max);
        assert_eq!(Direction::for_q(2.5), Direction::Min);
    }

    #[test]
    fn tally_pass_and_fail() {
        let mut t = Tally::new("x", 1.5, 2, 0);
        t.observe(-0.5);
        t.observe(5e-10);
        t.skip();
        let r = t.clone().finish(1e-9);
        assert!(r.pass);
        assert_eq!((r.trials, r.skipped), (2, 1));
        t.require(false, || "equality".into());
        assert!(!t.finish(1e-9).pass);

        let mut t = Tally::new("x", 1.5, 2, 0);
        t.observe(2e-9);
        assert!(!t.finish(1e-9).pass);
    }

    #[test]
    fn record_json_schema() {
        let r = VerificationRecord::skipped("thm53", 1.5, 2, 7, 10);
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(|s| s.as_str()).collect();
        for k in
            ["theorem", "q", "n", "seed", "closed_form", "numeric_opt", "worst_violation", "trials", "skipped", "pass"]
        {
            assert!(keys.contains(&k), "{k}");
        }
        assert_eq!(keys.len(), 10);
        assert!(r.is_skipped());
    }
}
