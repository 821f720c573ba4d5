//! Scalar trace functionals built from `log_q` and `exp_q`.
//!
//! Every functional carries `X` to the power `2 - q`. The Tsallis entropy
//! parameter `p` is converted to `q = 2 - p` on entry and not kept.

use crate::deformed::{domain_report, exp_q_spectral, log_q, log_q_matrix, Deformation, DomainReport};
use crate::error::{Error, Result};
use crate::linalg::{ContractionMatrix, DensityMatrix, HermitianMatrix, PositiveDefiniteMatrix, ISOMETRY_TOL};

/// `Re Tr X^t M`, computed in the eigenbasis of `X`.
pub fn trace_power_with(x: &PositiveDefiniteMatrix, t: f64, m: &HermitianMatrix) -> f64 {
    x.spectral().trace_map_with(|v| (t * v.ln()).exp(), m)
}

/// `Tr X^(2-q) log_q X`, the (negated) Tsallis entropy.
pub fn tsallis_entropy_functional(x: &PositiveDefiniteMatrix, q: Deformation) -> f64 {
    let p = q.p();
    x.spectral().eigenvalues().iter().map(|&v| (p * v.ln()).exp() * log_q(v, q).expect("positive eigenvalue")).sum()
}

fn same_dim(x: usize, y: usize, what: &str) -> Result<()> {
    if x != y {
        return Err(Error::domain(format!("{what}: dimensions {x} and {y} differ")));
    }
    Ok(())
}

/// Tsallis relative entropy `D_p(X|Y) = Tr(X - X^p Y^(1-p)) / (1 - p)`.
///
/// Evaluated as `Tr X^p (log_q X - log_q Y)` with `q = 2 - p`, which is the
/// same quantity without the cancellation near `p = 1`. Within `1e-8` of
/// `p = 1` this is the Umegaki form `Tr X (log X - log Y)`.
pub fn tsallis_relative_entropy(x: &PositiveDefiniteMatrix, y: &PositiveDefiniteMatrix, p: f64) -> Result<f64> {
    same_dim(x.dim(), y.dim(), "relative entropy")?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("entropy parameter p = {p} outside [0, 1]")));
    }
    let q = Deformation::from_entropy_parameter(p);
    let diff = &log_q_matrix(x, q) - &log_q_matrix(y, q);
    Ok(trace_power_with(x, q.p(), &diff))
}

/// Operands of `Tr X^(2-q)(log_q X - H* log_q(A) H)`.
#[derive(Debug, Clone)]
pub struct RelativeFunctionalInput {
    pub x: PositiveDefiniteMatrix,
    pub a: PositiveDefiniteMatrix,
    /// Maps the space of `X` into the space of `A`: `H* log_q(A) H` has the
    /// shape of `X`.
    pub h: ContractionMatrix,
    pub q: Deformation,
}

impl RelativeFunctionalInput {
    pub fn new(
        x: PositiveDefiniteMatrix,
        a: PositiveDefiniteMatrix,
        h: ContractionMatrix,
        q: Deformation,
    ) -> Result<Self> {
        if h.rows() != a.dim() || h.cols() != x.dim() {
            return Err(Error::DimensionMismatch(format!(
                "H is {}x{}, needs {}x{} for A {}x{} and X {}x{}",
                h.rows(),
                h.cols(),
                a.dim(),
                x.dim(),
                a.dim(),
                a.dim(),
                x.dim(),
                x.dim()
            )));
        }
        Ok(Self { x, a, h, q })
    }

    /// `H = I`.
    pub fn square(x: PositiveDefiniteMatrix, a: PositiveDefiniteMatrix, q: Deformation) -> Result<Self> {
        let n = x.dim();
        Self::new(x, a, ContractionMatrix::identity(n), q)
    }

    /// `H* log_q(A) H`.
    pub fn pulled_back_log(&self) -> HermitianMatrix {
        self.h.sandwich(&log_q_matrix(&self.a, self.q)).expect("shape checked at construction")
    }
}

pub fn relative_functional(inp: &RelativeFunctionalInput) -> Result<f64> {
    let diff = &log_q_matrix(&inp.x, inp.q) - &inp.pulled_back_log();
    Ok(trace_power_with(&inp.x, inp.q.p(), &diff))
}

/// Operands of `Tr exp_q(sum_i H_i* log_q(A_i) H_i)` with `sum_i H_i* H_i = I`.
#[derive(Debug, Clone)]
pub struct MultiTermInput {
    pub a: Vec<PositiveDefiniteMatrix>,
    pub h: Vec<ContractionMatrix>,
    pub q: Deformation,
}

impl MultiTermInput {
    pub fn new(a: Vec<PositiveDefiniteMatrix>, h: Vec<ContractionMatrix>, q: Deformation) -> Result<Self> {
        if a.is_empty() || a.len() != h.len() {
            return Err(Error::DimensionMismatch(format!("{} matrices but {} contractions", a.len(), h.len())));
        }
        let n = h[0].cols();
        for (ai, hi) in a.iter().zip(&h) {
            if hi.cols() != n || hi.rows() != ai.dim() {
                return Err(Error::DimensionMismatch(format!(
                    "H_i is {}x{}, needs {}x{n}",
                    hi.rows(),
                    hi.cols(),
                    ai.dim()
                )));
            }
        }
        let mut gram = HermitianMatrix::zeros(n);
        for hi in &h {
            gram = &gram + &hi.gram();
        }
        let deviation = gram.max_abs_diff(&HermitianMatrix::identity(n));
        if deviation > ISOMETRY_TOL {
            return Err(Error::domain(format!("sum of H_i* H_i differs from I by {deviation:e}")));
        }
        Ok(Self { a, h, q })
    }

    pub fn k(&self) -> usize {
        self.a.len()
    }

    pub fn dim(&self) -> usize {
        self.h[0].cols()
    }

    /// `sum_i H_i* log_q(A_i) H_i`.
    pub fn argument(&self) -> HermitianMatrix {
        let mut acc = HermitianMatrix::zeros(self.dim());
        for (ai, hi) in self.a.iter().zip(&self.h) {
            acc = &acc + &hi.sandwich(&log_q_matrix(ai, self.q)).expect("shape checked at construction");
        }
        acc
    }

    /// Every `A_i` scaled by `t > 0`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        let a = self.a.iter().map(|ai| ai.scale(t)).collect::<Result<Vec<_>>>()?;
        Ok(Self { a, h: self.h.clone(), q: self.q })
    }
}

/// `Tr exp_q(sum_i H_i* log_q(A_i) H_i)`.
pub fn phi_multi(inp: &MultiTermInput) -> Result<f64> {
    let spectral = inp.argument().eigh()?;
    let report: DomainReport = domain_report(&spectral, inp.q);
    if !report.inside {
        return Err(Error::domain(format!(
            "argument of exp_q has spectrum [{}, {}], bound {} for q = {}",
            report.min_eig,
            report.max_eig,
            report.bound,
            inp.q.q()
        )));
    }
    Ok(exp_q_spectral(&spectral, inp.q)?.trace())
}

/// `Tr X^(2-q) L - Tr X^(2-q) log_q X` on the density simplex.
pub fn gibbs_objective(x: &DensityMatrix, l: &HermitianMatrix, q: Deformation) -> Result<f64> {
    let x = x.as_pd();
    same_dim(x.dim(), l.dim(), "gibbs objective")?;
    Ok(trace_power_with(x, q.p(), l) - tsallis_entropy_functional(x, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{
        random_contraction, random_density, random_isometry, random_positive_definite, random_unitary, trial_rng,
        CMatrix,
    };
    use proptest::prelude::*;

    fn pd(v: &[f64]) -> PositiveDefiniteMatrix {
        PositiveDefiniteMatrix::diagonal(v).unwrap()
    }

    fn q(v: f64) -> Deformation {
        Deformation::new(v)
    }

    /// `(Tr X - Tr X^p Y^(1-p)) / (1 - p)` straight from products of powers.
    fn direct_relative_entropy(x: &PositiveDefiniteMatrix, y: &PositiveDefiniteMatrix, p: f64) -> f64 {
        let prod: CMatrix = x.power(p).matrix() * y.power(1.0 - p).matrix();
        (x.trace() - prod.trace().re) / (1.0 - p)
    }

    fn classical_relative_entropy(x: &PositiveDefiniteMatrix, y: &PositiveDefiniteMatrix) -> f64 {
        let diff = &x.map(f64::ln) - &y.map(f64::ln);
        x.as_hermitian().trace_with(&diff)
    }

    #[test]
    fn relative_entropy_examples() {
        let x = pd(&[0.5, 0.5]);
        assert!(tsallis_relative_entropy(&x, &x, 0.5).unwrap().abs() < 1e-15);
        let y = pd(&[0.25, 0.75]);
        let expected = 2.0 * (1.0 - (0.5f64.sqrt() * 0.25f64.sqrt() + 0.5f64.sqrt() * 0.75f64.sqrt()));
        let got = tsallis_relative_entropy(&x, &y, 0.5).unwrap();
        assert!((got - expected).abs() < 1e-14, "{got} vs {expected}");
        assert!((got - 0.068148).abs() < 1e-6);
    }

    #[test]
    fn relative_entropy_non_negative_on_states() {
        for seed in 1..=100 {
            let mut rng = trial_rng(seed, 0);
            let x = random_density(3, &mut rng);
            let y = random_density(3, &mut rng);
            let d = tsallis_relative_entropy(x.as_pd(), y.as_pd(), 0.5).unwrap();
            assert!(d >= -1e-12, "seed {seed}: {d}");
        }
    }

    #[test]
    fn relative_entropy_matches_direct_formula() {
        let mut rng = trial_rng(21, 0);
        for p in [0.0, 0.2, 0.5, 0.9] {
            let x = random_positive_definite(3, 0.1, 2.0, &mut rng);
            let y = random_positive_definite(3, 0.1, 2.0, &mut rng);
            let got = tsallis_relative_entropy(&x, &y, p).unwrap();
            let want = direct_relative_entropy(&x, &y, p);
            assert!((got - want).abs() < 1e-12 * (1.0 + want.abs()), "p={p}: {got} vs {want}");
        }
    }

    #[test]
    fn relative_entropy_umegaki_at_one() {
        let mut rng = trial_rng(22, 0);
        let x = random_positive_definite(3, 0.1, 2.0, &mut rng);
        let y = random_positive_definite(3, 0.1, 2.0, &mut rng);
        let want = classical_relative_entropy(&x, &y);
        assert!((tsallis_relative_entropy(&x, &y, 1.0).unwrap() - want).abs() < 1e-12);
        let near = tsallis_relative_entropy(&x, &y, 1.0 - 1e-6).unwrap();
        assert!((near - want).abs() < 1e-4 * (1.0 + want.abs()));
    }

    #[test]
    fn relative_entropy_rejects_bad_input() {
        let x = pd(&[1.0, 1.0]);
        assert!(tsallis_relative_entropy(&x, &pd(&[1.0]), 0.5).is_err());
        assert!(tsallis_relative_entropy(&x, &x, 1.5).is_err());
        assert!(tsallis_relative_entropy(&x, &x, -0.1).is_err());
    }

    #[test]
    fn relative_functional_examples() {
        let mut rng = trial_rng(3, 0);
        let a = random_positive_definite(3, 0.1, 2.0, &mut rng);
        for qv in [0.3, 1.0, 1.5, 2.7] {
            let inp = RelativeFunctionalInput::square(a.clone(), a.clone(), q(qv)).unwrap();
            assert!(relative_functional(&inp).unwrap().abs() < 1e-13);
        }
        let inp =
            RelativeFunctionalInput::square(pd(&[1.0, 2.0]), PositiveDefiniteMatrix::identity(2), q(1.5)).unwrap();
        let want = 2f64.sqrt() * 2.0 * (2f64.sqrt() - 1.0);
        assert!((relative_functional(&inp).unwrap() - want).abs() < 1e-14);
        assert!((want - 1.171573).abs() < 1e-6);
    }

    #[test]
    fn relative_functional_matches_entropy_for_identity_h() {
        let mut rng = trial_rng(4, 0);
        let x = random_positive_definite(3, 0.1, 2.0, &mut rng);
        let a = random_positive_definite(3, 0.1, 2.0, &mut rng);
        for qv in [1.0, 1.25, 1.5, 2.0] {
            let inp = RelativeFunctionalInput::square(x.clone(), a.clone(), q(qv)).unwrap();
            let lhs = relative_functional(&inp).unwrap();
            let rhs = tsallis_relative_entropy(&x, &a, 2.0 - qv).unwrap();
            assert!((lhs - rhs).abs() < 1e-10, "q={qv}");
            let direct =
                if qv == 1.0 { classical_relative_entropy(&x, &a) } else { direct_relative_entropy(&x, &a, 2.0 - qv) };
            assert!((lhs - direct).abs() < 1e-10, "q={qv}");
        }
    }

    #[test]
    fn relative_functional_shape_checks() {
        let x = pd(&[1.0, 1.0]);
        let a = pd(&[1.0, 1.0, 1.0]);
        assert!(RelativeFunctionalInput::new(x.clone(), a.clone(), ContractionMatrix::identity(2), q(1.5)).is_err());
        let mut rng = trial_rng(5, 0);
        let h = random_contraction(3, 2, &mut rng);
        let inp = RelativeFunctionalInput::new(x, a, h, q(1.5)).unwrap();
        assert!(relative_functional(&inp).unwrap().is_finite());
    }

    fn isometry_split(n: usize, k: usize, seed: u64) -> Vec<ContractionMatrix> {
        let mut rng = trial_rng(seed, 0);
        let v = random_isometry(k * n, n, &mut rng);
        (0..k).map(|i| ContractionMatrix::new(v.matrix().rows(i * n, n).into_owned()).unwrap()).collect()
    }

    #[test]
    fn phi_examples() {
        let mut rng = trial_rng(8, 0);
        let a = random_positive_definite(3, 0.1, 2.0, &mut rng);
        for qv in [0.5, 1.0, 1.5, 2.5] {
            let inp = MultiTermInput::new(vec![a.clone()], vec![ContractionMatrix::identity(3)], q(qv)).unwrap();
            assert!((phi_multi(&inp).unwrap() - a.trace()).abs() < 1e-12);
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let h = vec![ContractionMatrix::scaled_identity(3, s), ContractionMatrix::scaled_identity(3, s)];
            let ids = vec![PositiveDefiniteMatrix::identity(3); 2];
            let inp = MultiTermInput::new(ids, h, q(qv)).unwrap();
            assert!((phi_multi(&inp).unwrap() - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_homogeneous_on_isometry_split() {
        let h = isometry_split(3, 2, 6);
        let mut rng = trial_rng(6, 1);
        let a = vec![random_positive_definite(3, 0.1, 2.0, &mut rng), random_positive_definite(3, 0.1, 2.0, &mut rng)];
        let inp = MultiTermInput::new(a, h, q(0.5)).unwrap();
        let base = phi_multi(&inp).unwrap();
        let scaled = phi_multi(&inp.scaled(2.5).unwrap()).unwrap();
        assert!((scaled - 2.5 * base).abs() <= 1e-9 * scaled.abs());
    }

    #[test]
    fn phi_rejects_non_isometric_family() {
        let h = vec![ContractionMatrix::scaled_identity(2, 0.5), ContractionMatrix::scaled_identity(2, 0.5)];
        assert!(MultiTermInput::new(vec![pd(&[1.0, 1.0]); 2], h, q(1.5)).is_err());
    }

    #[test]
    fn gibbs_examples() {
        let x = DensityMatrix::maximally_mixed(2);
        let g = gibbs_objective(&x, &HermitianMatrix::zeros(2), q(1.5)).unwrap();
        assert!((g - 2.0 * (2f64.sqrt() - 1.0)).abs() < 1e-14);
        assert!((g - 0.828427).abs() < 1e-6);

        let mut rng = trial_rng(9, 0);
        let x = random_density(3, &mut rng);
        let s = gibbs_objective(&x, &HermitianMatrix::zeros(3), q(1.0)).unwrap();
        let von_neumann: f64 = x.as_pd().spectral().eigenvalues().iter().map(|v| -v * v.ln()).sum();
        assert!((s - von_neumann).abs() < 1e-14);
        assert!(s >= 0.0);
    }

    #[test]
    fn gibbs_vanishes_at_gibbs_state_of_zero() {
        // X = I/n, L = log_q(I/n) makes both terms equal
        let x = DensityMatrix::maximally_mixed(3);
        for qv in [0.5, 1.0, 1.5, 2.5] {
            let l = log_q_matrix(x.as_pd(), q(qv));
            assert!(gibbs_objective(&x, &l, q(qv)).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn entropy_functional_examples() {
        let x = DensityMatrix::maximally_mixed(2);
        assert!((tsallis_entropy_functional(x.as_pd(), q(1.0)) + 2f64.ln()).abs() < 1e-15);
        let pure = pd(&[1.0 - 1e-6, 1e-6]);
        assert!(tsallis_entropy_functional(&pure, q(1.5)).abs() < 1e-2);
        assert!((tsallis_entropy_functional(&pd(&[2.0]), q(2.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn classical_limits() {
        let mut rng = trial_rng(30, 0);
        let x = random_density(3, &mut rng);
        let a = random_positive_definite(3, 0.1, 2.0, &mut rng);
        let l = crate::linalg::random_hermitian(3, &mut rng);
        let rel = |qv: f64| {
            relative_functional(&RelativeFunctionalInput::square(x.as_pd().clone(), a.clone(), q(qv)).unwrap()).unwrap()
        };
        let ent = |qv: f64| tsallis_entropy_functional(x.as_pd(), q(qv));
        let gibbs = |qv: f64| gibbs_objective(&x, &l, q(qv)).unwrap();
        let classical_rel = classical_relative_entropy(x.as_pd(), &a);
        let classical_ent: f64 = x.as_pd().spectral().eigenvalues().iter().map(|v| v * v.ln()).sum();
        let classical_gibbs = x.as_pd().as_hermitian().trace_with(&l) - classical_ent;
        for qv in [1.0 - 1e-6, 1.0 + 1e-6] {
            assert!((rel(qv) - classical_rel).abs() <= 1e-4 * classical_rel.abs().max(1e-12));
            assert!((ent(qv) - classical_ent).abs() <= 1e-4 * classical_ent.abs());
            assert!((gibbs(qv) - classical_gibbs).abs() <= 1e-4 * classical_gibbs.abs().max(1.0));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn unitary_invariance(seed in 0u64..10_000, qi in 0usize..5, n in 2usize..5) {
            let qv = [0.5, 1.0, 1.5, 2.0, 2.5][qi];
            let mut rng = trial_rng(seed, 0);
            let x = random_density(n, &mut rng);
            let a = random_positive_definite(n + 1, 0.1, 2.0, &mut rng);
            let h = random_contraction(n + 1, n, &mut rng);
            let l = crate::linalg::random_hermitian(n, &mut rng).scale(0.1);
            let u = random_unitary(n, &mut rng);
            let v = random_unitary(n + 1, &mut rng);
            let rot = |m: &PositiveDefiniteMatrix, w: &CMatrix| PositiveDefiniteMatrix::new(m.as_hermitian().conjugate_by(w)).unwrap();

            let x2 = DensityMatrix::new(rot(x.as_pd(), &u)).unwrap();
            let a2 = rot(&a, &v);
            let h2 = h.rotate(&v, &u);
            let l2 = l.conjugate_by(&u);

            let r1 = relative_functional(&RelativeFunctionalInput::new(x.as_pd().clone(), a.clone(), h, q(qv)).unwrap()).unwrap();
            let r2 = relative_functional(&RelativeFunctionalInput::new(x2.as_pd().clone(), a2.clone(), h2, q(qv)).unwrap()).unwrap();
            prop_assert!((r1 - r2).abs() <= 1e-10 * (1.0 + r1.abs()));

            let g1 = gibbs_objective(&x, &l, q(qv)).unwrap();
            let g2 = gibbs_objective(&x2, &l2, q(qv)).unwrap();
            prop_assert!((g1 - g2).abs() <= 1e-10 * (1.0 + g1.abs()));

            let e1 = tsallis_entropy_functional(x.as_pd(), q(qv));
            let e2 = tsallis_entropy_functional(x2.as_pd(), q(qv));
            prop_assert!((e1 - e2).abs() <= 1e-10 * (1.0 + e1.abs()));

            let b = random_positive_definite(n, 0.1, 2.0, &mut rng);
            let b2 = rot(&b, &u);
            let d1 = tsallis_relative_entropy(x.as_pd(), &b, 2.0 - qv.clamp(1.0, 2.0)).unwrap();
            let d2 = tsallis_relative_entropy(x2.as_pd(), &b2, 2.0 - qv.clamp(1.0, 2.0)).unwrap();
            prop_assert!((d1 - d2).abs() <= 1e-10 * (1.0 + d1.abs()));

            let hs = isometry_split(n, 2, seed);
            let hs2: Vec<_> = hs.iter().map(|hi| hi.rotate(&u, &u)).collect();
            let c = random_positive_definite(n, 0.1, 2.0, &mut rng);
            let m1 = MultiTermInput::new(vec![b.clone(), c.clone()], hs, q(qv)).unwrap();
            let m2 = MultiTermInput::new(vec![b2, rot(&c, &u)], hs2, q(qv)).unwrap();
            let p1 = phi_multi(&m1).unwrap();
            let p2 = phi_multi(&m2).unwrap();
            prop_assert!((p1 - p2).abs() <= 1e-10 * (1.0 + p1.abs()));
        }

        #[test]
        fn phi_positive_homogeneity(seed in 0u64..10_000, qi in 0usize..4, t in 0.1f64..10.0) {
            let qv = [0.5, 1.0, 1.5, 2.5][qi];
            let h = isometry_split(3, 2, seed);
            let mut rng = trial_rng(seed, 1);
            let a = vec![random_positive_definite(3, 0.1, 2.0, &mut rng), random_positive_definite(3, 0.1, 2.0, &mut rng)];
            let inp = MultiTermInput::new(a, h, q(qv)).unwrap();
            let base = phi_multi(&inp).unwrap();
            let scaled = phi_multi(&inp.scaled(t).unwrap()).unwrap();
            prop_assert!((scaled - t * base).abs() <= 1e-9 * scaled.abs());
        }
    }
}
