//! Objectives of the variational representations, as plain functions.

use crate::deformed::{exp_q_matrix, log_q, log_q_matrix, Deformation};
use crate::error::{Error, Result};
use crate::functionals::{trace_power_with, tsallis_entropy_functional};
use crate::linalg::{HermitianMatrix, PositiveDefiniteMatrix};

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(format!("{a}x{a} and {b}x{b} operands")));
    }
    Ok(())
}

/// `Tr X - Tr X^(2-q)(log_q X - M)`.
///
/// With `M = log_q Y` this is the objective whose optimum over `X > 0` is
/// `Tr Y`; every representation of `Tr exp_q(M)` over the cone uses it.
pub fn young_objective(x: &PositiveDefiniteMatrix, m: &HermitianMatrix, q: Deformation) -> Result<f64> {
    same_dim(x.dim(), m.dim())?;
    Ok(x.trace() - tsallis_entropy_functional(x, q) + trace_power_with(x, q.p(), m))
}

/// `Tr X - Tr X^(2-q)(log_q X - log_q Y)`.
pub fn lemma21_objective(x: &PositiveDefiniteMatrix, y: &PositiveDefiniteMatrix, q: Deformation) -> Result<f64> {
    young_objective(x, &log_q_matrix(y, q), q)
}

/// `G(L) = Tr X + Tr X^(2-q) L - Tr exp_q(L + Z)`.
pub fn relative_dual_objective(
    x: &PositiveDefiniteMatrix,
    z: &HermitianMatrix,
    l: &HermitianMatrix,
    q: Deformation,
) -> Result<f64> {
    same_dim(x.dim(), l.dim())?;
    same_dim(z.dim(), l.dim())?;
    Ok(x.trace() + trace_power_with(x, q.p(), l) - exp_q_matrix(&(l + z), q)?.trace())
}

/// `Tr X^(2-q) L - Tr X^(2-q) log_q X` without the unit-trace check.
pub fn gibbs_value(x: &PositiveDefiniteMatrix, l: &HermitianMatrix, q: Deformation) -> Result<f64> {
    same_dim(x.dim(), l.dim())?;
    Ok(trace_power_with(x, q.p(), l) - tsallis_entropy_functional(x, q))
}

/// `log_q Tr exp_q(L)`.
pub fn log_trace_exp(l: &HermitianMatrix, q: Deformation) -> Result<f64> {
    log_q(exp_q_matrix(l, q)?.trace(), q)
}

/// `Tr X^(2-q) L - log_q Tr exp_q(L + Z)`.
pub fn entropy_dual_objective(
    x: &PositiveDefiniteMatrix,
    z: &HermitianMatrix,
    l: &HermitianMatrix,
    q: Deformation,
) -> Result<f64> {
    same_dim(x.dim(), l.dim())?;
    same_dim(z.dim(), l.dim())?;
    Ok(trace_power_with(x, q.p(), l) - log_trace_exp(&(l + z), q)?)
}
