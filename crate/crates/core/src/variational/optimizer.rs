//! Finite-difference steepest ascent/descent over parametrized feasible sets.
//!
//! The free variable is a Hermitian `S` written in an orthonormal basis of
//! Hermitian matrices, so the search space is `R^(n^2)`. Feasible sets map
//! `S` to a point that satisfies their constraint strictly.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::problem::{Candidate, VariationalProblem};
use crate::error::{Error, Result};
use crate::linalg::{random_hermitian, trial_rng, CMatrix, Complex64, HermitianMatrix};
use crate::record::Direction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    pub max_iters: usize,
    pub step_init: f64,
    pub fd_step: f64,
    pub restarts: usize,
    pub tol_grad: f64,
    /// Seed of the random restarts; restart 0 is deterministic.
    pub seed: u64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self { max_iters: 2000, step_init: 0.1, fd_step: 1e-5, restarts: 5, tol_grad: 1e-8, seed: 0 }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        let ok = self.max_iters > 0
            && self.restarts > 0
            && self.step_init > 0.0
            && self.fd_step > 0.0
            && self.tol_grad > 0.0;
        if !ok {
            return Err(Error::Config(format!("optimizer settings must be positive: {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct NumericOptimum {
    pub value: f64,
    pub argument: Candidate,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged_restarts: usize,
}

/// Orthonormal basis of the real space of `n x n` Hermitian matrices.
#[derive(Debug, Clone)]
pub struct HermitianBasis {
    n: usize,
}

impl HermitianBasis {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `sum_k v_k B_k`.
    pub fn compose(&self, v: &[f64]) -> HermitianMatrix {
        let n = self.n;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut m = CMatrix::zeros(n, n);
        let mut k = 0;
        for i in 0..n {
            m[(i, i)] = Complex64::new(v[k], 0.0);
            k += 1;
        }
        for i in 0..n {
            for j in i + 1..n {
                let (re, im) = (v[k] * s, v[k + 1] * s);
                m[(i, j)] = Complex64::new(re, im);
                m[(j, i)] = Complex64::new(re, -im);
                k += 2;
            }
        }
        HermitianMatrix::from_hermitian_parts(m)
    }

    /// Coordinates `<B_k, M>`.
    pub fn coordinates(&self, m: &HermitianMatrix) -> Vec<f64> {
        let n = self.n;
        let s = std::f64::consts::SQRT_2;
        let a = m.matrix();
        let mut v = Vec::with_capacity(n * n);
        for i in 0..n {
            v.push(a[(i, i)].re);
        }
        for i in 0..n {
            for j in i + 1..n {
                v.push(a[(i, j)].re * s);
                v.push(a[(i, j)].im * s);
            }
        }
        v
    }

    pub fn unit(&self, k: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.len()];
        v[k] = 1.0;
        v
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Central finite-difference gradient of `f` at `v`; `None` if a probe leaves
/// the domain of `f`.
pub fn fd_gradient(f: &impl Fn(&[f64]) -> f64, v: &[f64], h: f64) -> Option<Vec<f64>> {
    let mut probe = v.to_vec();
    let mut g = Vec::with_capacity(v.len());
    for k in 0..v.len() {
        probe[k] = v[k] + h;
        let up = f(&probe);
        probe[k] = v[k] - h;
        let down = f(&probe);
        probe[k] = v[k];
        if !up.is_finite() || !down.is_finite() {
            return None;
        }
        g.push((up - down) / (2.0 * h));
    }
    Some(g)
}

struct RunOutcome {
    value: f64,
    point: Vec<f64>,
    grad_norm: f64,
    iterations: usize,
    converged: bool,
}

/// Minimizes `f` from `start` by steepest descent with Barzilai-Borwein
/// steps and Armijo backtracking.
fn descend(f: &impl Fn(&[f64]) -> f64, start: Vec<f64>, settings: &OptimizerSettings) -> RunOutcome {
    let mut x = start;
    let mut fx = f(&x);
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut grad_norm = f64::INFINITY;
    if !fx.is_finite() {
        return RunOutcome { value: fx, point: x, grad_norm, iterations: 0, converged: false };
    }
    for iter in 0..settings.max_iters {
        let Some(g) = fd_gradient(f, &x, settings.fd_step) else {
            // the start sits within one probe of the boundary
            return RunOutcome { value: fx, point: x, grad_norm, iterations: iter, converged: false };
        };
        grad_norm = norm(&g);
        if grad_norm <= settings.tol_grad * (1.0 + fx.abs()) {
            return RunOutcome { value: fx, point: x, grad_norm, iterations: iter, converged: true };
        }
        let mut step = settings.step_init / grad_norm.max(1.0);
        if let Some((px, pg)) = &prev {
            let s: Vec<f64> = x.iter().zip(px).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = g.iter().zip(pg).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            if sy > 0.0 {
                step = dot(&s, &s) / sy;
            }
        }
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            let ft = f(&trial);
            if ft.is_finite() && ft <= fx - 1e-4 * step * grad_norm * grad_norm {
                accepted = Some((trial, ft));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((trial, ft)) => {
                prev = Some((std::mem::replace(&mut x, trial), g));
                fx = ft;
            }
            // no decrease representable in floating point
            None => return RunOutcome { value: fx, point: x, grad_norm, iterations: iter, converged: true },
        }
    }
    RunOutcome { value: fx, point: x, grad_norm, iterations: settings.max_iters, converged: false }
}

/// Best value of the problem's objective over `restarts` descents.
pub fn numeric_optimum(problem: &VariationalProblem, settings: &OptimizerSettings) -> Result<NumericOptimum> {
    settings.validate()?;
    let basis = HermitianBasis::new(problem.dim);
    let sign = problem.direction.sign();
    let f = |v: &[f64]| -> f64 {
        let s = basis.compose(v);
        match problem.feasible_set.parametrize(&s).and_then(|c| (problem.objective)(&c)) {
            Ok(val) if val.is_finite() => -sign * val,
            _ => f64::INFINITY,
        }
    };
    let mut best: Option<RunOutcome> = None;
    let mut converged = 0;
    let mut worst_grad = 0.0f64;
    let mut total_iters = 0;
    for r in 0..settings.restarts {
        let start = if r == 0 {
            basis.coordinates(&problem.feasible_set.initial_parameter(problem.dim))
        } else {
            let mut rng = trial_rng(settings.seed, r as u64);
            let scale = rng.random_range(0.2..1.0);
            let s = &problem.feasible_set.initial_parameter(problem.dim)
                + &random_hermitian(problem.dim, &mut rng).scale(scale);
            basis.coordinates(&s)
        };
        let out = descend(&f, start, settings);
        total_iters += out.iterations;
        if out.converged {
            converged += 1;
        } else {
            worst_grad = worst_grad.max(out.grad_norm);
        }
        if out.value.is_finite() && best.as_ref().is_none_or(|b| out.value < b.value) {
            best = Some(out);
        }
    }
    if converged == 0 {
        return Err(Error::DidNotConverge { grad_norm: worst_grad, iterations: total_iters });
    }
    let best = best.expect("a converged restart has a finite value");
    let argument = problem.feasible_set.parametrize(&basis.compose(&best.point))?;
    Ok(NumericOptimum {
        value: -sign * best.value,
        argument,
        grad_norm: best.grad_norm,
        iterations: total_iters,
        converged_restarts: converged,
    })
}

/// Norm of the finite-difference gradient of the objective at `point`, taken
/// directly in matrix coordinates and projected onto the tangent space of the
/// feasible set.
pub fn projected_gradient_norm(problem: &VariationalProblem, point: &Candidate, h: f64) -> Result<f64> {
    let basis = HermitianBasis::new(problem.dim);
    let base = point.hermitian().clone();
    let f = |v: &[f64]| -> f64 {
        let m = &base + &basis.compose(v);
        problem.feasible_set.wrap_unchecked(m).and_then(|c| (problem.objective)(&c)).unwrap_or(f64::NAN)
    };
    let zero = vec![0.0; basis.len()];
    let mut g = fd_gradient(&f, &zero, h).ok_or_else(|| Error::domain("gradient probe left the domain"))?;
    if problem.feasible_set.is_simplex() {
        // remove the component along I / sqrt(n)
        let n = problem.dim;
        let mean = g[..n].iter().sum::<f64>() / n as f64;
        for v in &mut g[..n] {
            *v -= mean;
        }
    }
    Ok(norm(&g))
}

/// `Direction`-aware comparison helper used by the verifiers.
pub(crate) fn gap(direction: Direction, value: f64, optimum: f64) -> f64 {
    direction.sense().violation(value - optimum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_round_trip_and_orthonormality() {
        let b = HermitianBasis::new(3);
        let v: Vec<f64> = (0..9).map(|k| k as f64 - 3.5).collect();
        let m = b.compose(&v);
        let back = b.coordinates(&m);
        for (x, y) in v.iter().zip(&back) {
            assert!((x - y).abs() < 1e-14);
        }
        for i in 0..9 {
            for j in 0..9 {
                let ip = b.compose(&b.unit(i)).trace_with(&b.compose(&b.unit(j)));
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn descent_on_quadratic() {
        let f = |v: &[f64]| (v[0] - 1.0).powi(2) + 10.0 * (v[1] + 2.0).powi(2);
        let out = descend(&f, vec![0.0, 0.0], &OptimizerSettings::default());
        assert!(out.converged);
        assert!((out.point[0] - 1.0).abs() < 1e-6 && (out.point[1] + 2.0).abs() < 1e-6);
    }

    #[test]
    fn fd_gradient_of_linear_map() {
        let f = |v: &[f64]| 3.0 * v[0] - 2.0 * v[1];
        let g = fd_gradient(&f, &[0.3, 0.4], 1e-5).unwrap();
        assert!((g[0] - 3.0).abs() < 1e-9 && (g[1] + 2.0).abs() < 1e-9);
    }
}
