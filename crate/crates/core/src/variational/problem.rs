use crate::deformed::{Deformation, DomainSide, DOMAIN_MARGIN};
use crate::error::{Error, Result};
use crate::linalg::{HermitianMatrix, PositiveDefiniteMatrix, DENSITY_TRACE_TOL};
use crate::record::Direction;

/// A point of a feasible set: a positive definite `X` or a Hermitian `L`.
#[derive(Debug, Clone)]
pub enum Candidate {
    State(PositiveDefiniteMatrix),
    Operator(HermitianMatrix),
}

impl Candidate {
    pub fn hermitian(&self) -> &HermitianMatrix {
        match self {
            Candidate::State(x) => x.as_hermitian(),
            Candidate::Operator(l) => l,
        }
    }

    pub fn state(&self) -> Result<&PositiveDefiniteMatrix> {
        match self {
            Candidate::State(x) => Ok(x),
            Candidate::Operator(_) => Err(Error::domain("expected a positive definite point")),
        }
    }

    pub fn operator(&self) -> &HermitianMatrix {
        self.hermitian()
    }
}

/// Which way `L - shift` must point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `L > shift`
    Above,
    /// `L < shift`
    Below,
    /// no constraint
    Free,
}

#[derive(Debug, Clone)]
pub enum FeasibleSet {
    PdCone,
    DensitySimplex,
    /// `{L : L - shift > 0}`, `< 0`, or all of Hermitian space, per `side`,
    /// parametrized as `L = shift +- scale exp(S/scale)`.
    Admissible {
        shift: HermitianMatrix,
        side: Side,
        scale: f64,
    },
}

impl FeasibleSet {
    /// `{L : exp_q(L + offset) is defined}`, with `S = 0` at `L = -offset`.
    pub fn exp_q_domain(q: Deformation, offset: &HermitianMatrix) -> Self {
        let domain = q.domain();
        let (side, bound) = match domain.side {
            DomainSide::LowerBound => (Side::Above, domain.bound),
            DomainSide::UpperBound => (Side::Below, domain.bound),
            DomainSide::Unbounded => (Side::Free, 0.0),
        };
        let shift = &HermitianMatrix::scalar(offset.dim(), bound) - offset;
        FeasibleSet::Admissible { shift, side, scale: bound.abs().max(f64::MIN_POSITIVE) }
    }

    /// `L >= 0` for `q >= 1`, `L <= 0` for `q < 1` (kept strict).
    pub fn sign_constrained(q: Deformation, n: usize) -> Self {
        let side = if q.q() < 1.0 && !q.is_classical() { Side::Below } else { Side::Above };
        FeasibleSet::Admissible { shift: HermitianMatrix::zeros(n), side, scale: 1.0 }
    }

    pub fn is_simplex(&self) -> bool {
        matches!(self, FeasibleSet::DensitySimplex)
    }

    /// Maps a free Hermitian parameter onto the set.
    pub fn parametrize(&self, s: &HermitianMatrix) -> Result<Candidate> {
        match self {
            FeasibleSet::PdCone => {
                let d = s.eigh()?;
                let values = d.eigenvalues().iter().map(|v| v.exp()).collect();
                Ok(Candidate::State(PositiveDefiniteMatrix::from_spectrum(d.eigenvectors().clone(), values)?))
            }
            FeasibleSet::DensitySimplex => {
                let d = s.eigh()?;
                let top = d.max_eigenvalue();
                let weights: Vec<f64> = d.eigenvalues().iter().map(|v| (v - top).exp()).collect();
                let total: f64 = weights.iter().sum();
                let values = weights.iter().map(|w| w / total).collect();
                Ok(Candidate::State(PositiveDefiniteMatrix::from_spectrum(d.eigenvectors().clone(), values)?))
            }
            FeasibleSet::Admissible { shift, side, scale } => {
                let e = || -> Result<HermitianMatrix> { Ok(s.eigh()?.map(|v| scale * (v / scale).exp())) };
                Ok(Candidate::Operator(match side {
                    Side::Free => shift + s,
                    Side::Above => shift + &e()?,
                    Side::Below => shift - &e()?,
                }))
            }
        }
    }

    /// Parameter of the default starting point.
    pub fn initial_parameter(&self, n: usize) -> HermitianMatrix {
        HermitianMatrix::zeros(n)
    }

    /// Wraps a matrix without checking the trace or sign constraint.
    pub fn wrap_unchecked(&self, m: HermitianMatrix) -> Result<Candidate> {
        match self {
            FeasibleSet::PdCone | FeasibleSet::DensitySimplex => Ok(Candidate::State(PositiveDefiniteMatrix::new(m)?)),
            FeasibleSet::Admissible { .. } => Ok(Candidate::Operator(m)),
        }
    }

    /// Wraps a matrix, refusing points outside the set.
    pub fn wrap(&self, m: HermitianMatrix) -> Result<Candidate> {
        let c = self.wrap_unchecked(m)?;
        if self.contains(&c)? {
            Ok(c)
        } else {
            Err(Error::domain("point outside the feasible set"))
        }
    }

    pub fn contains(&self, c: &Candidate) -> Result<bool> {
        Ok(match (self, c) {
            (FeasibleSet::PdCone, Candidate::State(_)) => true,
            (FeasibleSet::DensitySimplex, Candidate::State(x)) => (x.trace() - 1.0).abs() <= DENSITY_TRACE_TOL,
            (FeasibleSet::Admissible { shift, side, .. }, Candidate::Operator(l)) => match side {
                Side::Free => true,
                Side::Above => (l - shift).eigh()?.min_eigenvalue() > DOMAIN_MARGIN,
                Side::Below => (l - shift).eigh()?.max_eigenvalue() < -DOMAIN_MARGIN,
            },
            _ => false,
        })
    }
}

pub type Objective<'a> = Box<dyn Fn(&Candidate) -> Result<f64> + Send + Sync + 'a>;

/// An objective with a claimed optimizer and optimum over a feasible set.
pub struct VariationalProblem<'a> {
    pub objective: Objective<'a>,
    pub direction: Direction,
    pub feasible_set: FeasibleSet,
    pub closed_form_optimizer: Candidate,
    pub closed_form_value: f64,
    pub theorem_tag: String,
    pub dim: usize,
}

impl<'a> VariationalProblem<'a> {
    /// Refuses an optimizer outside the feasible set.
    pub fn new(
        theorem_tag: impl Into<String>,
        objective: Objective<'a>,
        direction: Direction,
        feasible_set: FeasibleSet,
        closed_form_optimizer: Candidate,
        closed_form_value: f64,
    ) -> Result<Self> {
        if !feasible_set.contains(&closed_form_optimizer)? {
            return Err(Error::domain("closed-form optimizer is not feasible"));
        }
        let dim = closed_form_optimizer.hermitian().dim();
        Ok(Self {
            objective,
            direction,
            feasible_set,
            closed_form_optimizer,
            closed_form_value,
            theorem_tag: theorem_tag.into(),
            dim,
        })
    }

    pub fn evaluate(&self, c: &Candidate) -> Result<f64> {
        (self.objective)(c)
    }
}

impl std::fmt::Debug for VariationalProblem<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VariationalProblem")
            .field("theorem_tag", &self.theorem_tag)
            .field("direction", &self.direction)
            .field("feasible_set", &self.feasible_set)
            .field("closed_form_value", &self.closed_form_value)
            .field("dim", &self.dim)
            .finish()
    }
}
