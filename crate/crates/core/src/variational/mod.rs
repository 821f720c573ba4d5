//! Variational representations: objectives, feasible sets, a numeric oracle
//! and per-representation verifiers.

mod legendre;
mod objectives;
mod optimizer;
mod problem;
mod verifiers;

pub use legendre::{legendre_objective, scalar_legendre_fenchel, ScalarOptimum, LF_GRID};
pub use objectives::{
    entropy_dual_objective, gibbs_value, lemma21_objective, log_trace_exp, relative_dual_objective, young_objective,
};
pub use optimizer::{
    fd_gradient, numeric_optimum, projected_gradient_norm, HermitianBasis, NumericOptimum, OptimizerSettings,
};
pub use problem::{Candidate, FeasibleSet, Objective, Side, VariationalProblem};
pub use verifiers::*;
