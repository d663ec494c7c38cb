//! Pairs of hermitian matrices and the relative-bound constant of their
//! (anti)commutator with respect to the combined graph norm
//! `⟨x|x⟩_{S,T} = ‖x‖² + ‖Sx‖² + ‖Tx‖² = ⟨x|Gx⟩`, `G = I + S² + T²`.
//!
//! In finite dimensions every such bound holds with some constant, so the
//! interesting quantity is the optimal one,
//! `C = max_x ‖[S,T]_± x‖² / ⟨x|Gx⟩`, a generalized eigenvalue.

mod diagnostics;
mod report;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::pauli;
use crate::linops::{gen_eig_max, gen_eig_max_vector, resolvent, CMatrix, GenEigMax, LinopsError, HERMITIAN_TOL};

pub use diagnostics::{
    approx_identity_table, fitted_rate, lemma_a1_tables, lemma_a2_tables, lemma_a3_bound, lm_lemma32_constant,
    lm_lemma32_table, prop23_tables, resolvent_approx_error, resolvent_approx_table, select_lambda0,
    sum_approx_residual, sum_approx_table, test_vectors, DiagnosticsTable, Direction, Grid, LemmaA3Bound, TableMeta,
    EXTREME_TEST_VECTORS, GAUSSIAN_TEST_VECTORS, MAX_LAMBDA0_DOUBLINGS,
};
pub use report::{weakpair_report, DiagnosticsConfig, WeakpairReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BracketKind {
    Commutator,
    Anticommutator,
}

impl std::str::FromStr for BracketKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "commutator" => Ok(Self::Commutator),
            "anticommutator" => Ok(Self::Anticommutator),
            other => Err(format!("unknown bracket kind `{other}`")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum WeakpairError {
    #[error("{which} is not hermitian (residual {residual:e})")]
    NotHermitian { which: &'static str, residual: f64 },
    #[error("S is {s}x{s} but T is {t}x{t}")]
    DimensionMismatch { s: usize, t: usize },
    #[error("operation needs a {needed:?} pair")]
    WrongKind { needed: BracketKind },
    #[error("parameter must be positive and finite, got {value}")]
    BadParameter { value: f64 },
    #[error("resolvent singular at lambda = {lambda}: {source}")]
    SingularAt { lambda: Complex64, source: LinopsError },
    #[error("could not find lambda0 with invertible resolvents after {doublings} doublings")]
    NoLambda0 { doublings: usize },
    #[error(transparent)]
    Linops(#[from] LinopsError),
}

/// Hermitian `S`, `T` with the cached Gram matrix `G = I + S² + T²`.
#[derive(Clone, Debug)]
pub struct OperatorPair {
    s: CMatrix,
    t: CMatrix,
    kind: BracketKind,
    g: CMatrix,
}

fn check_hermitian(m: &CMatrix, which: &'static str) -> Result<(), WeakpairError> {
    if !m.is_square() {
        return Err(LinopsError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        }
        .into());
    }
    let residual = m.hermiticity_residual();
    if residual > HERMITIAN_TOL * m.fro_norm() {
        return Err(WeakpairError::NotHermitian { which, residual });
    }
    Ok(())
}

fn square_plus(m: &CMatrix) -> CMatrix {
    m.matmul(m).hermitian_part()
}

impl OperatorPair {
    pub fn new(s: CMatrix, t: CMatrix, kind: BracketKind) -> Result<Self, WeakpairError> {
        check_hermitian(&s, "S")?;
        check_hermitian(&t, "T")?;
        if s.rows() != t.rows() {
            return Err(WeakpairError::DimensionMismatch {
                s: s.rows(),
                t: t.rows(),
            });
        }
        let g = (&square_plus(&s) + &square_plus(&t)).shift_diag(Complex64::new(1.0, 0.0));
        Ok(Self { s, t, kind, g })
    }

    pub fn s(&self) -> &CMatrix {
        &self.s
    }

    pub fn t(&self) -> &CMatrix {
        &self.t
    }

    pub fn kind(&self) -> BracketKind {
        self.kind
    }

    /// `G = I + S² + T²`.
    pub fn gram(&self) -> &CMatrix {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.s.rows()
    }

    /// `⟨x|y⟩_{S,T} = ⟨x|y⟩ + ⟨Sx|Sy⟩ + ⟨Tx|Ty⟩`.
    pub fn graph_inner(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        crate::linops::inner(x, &self.g.matvec(y))
    }

    fn require(&self, kind: BracketKind) -> Result<(), WeakpairError> {
        if self.kind != kind {
            return Err(WeakpairError::WrongKind { needed: kind });
        }
        Ok(())
    }
}

/// `ST - TS` or `ST + TS`.
pub fn bracket(pair: &OperatorPair) -> CMatrix {
    match pair.kind {
        BracketKind::Commutator => pair.s.commutator(&pair.t),
        BracketKind::Anticommutator => pair.s.anticommutator(&pair.t),
    }
}

fn gram_of_bracket(pair: &OperatorPair) -> CMatrix {
    let x = bracket(pair);
    x.adjoint().matmul(&x).hermitian_part()
}

/// Optimal `C` with `‖[S,T]_± x‖² ≤ C ⟨x|x⟩_{S,T}` for all `x`.
pub fn condition1_constant(pair: &OperatorPair) -> Result<f64, WeakpairError> {
    Ok(gen_eig_max(&gram_of_bracket(pair), &pair.g)?.max(0.0))
}

/// [`condition1_constant`] with a vector attaining it.
pub fn condition1_witness(pair: &OperatorPair) -> Result<GenEigMax, WeakpairError> {
    Ok(gen_eig_max_vector(&gram_of_bracket(pair), &pair.g)?)
}

/// Optimal constant against the graph norm of `S` alone, `G = I + S²`.
pub fn old_constant(pair: &OperatorPair) -> Result<f64, WeakpairError> {
    let g = square_plus(&pair.s).shift_diag(Complex64::new(1.0, 0.0));
    Ok(gen_eig_max(&gram_of_bracket(pair), &g)?.max(0.0))
}

/// `S̃ = S ⊗ σ₁`, `T̃ = T ⊗ σ₂`, so that `[S̃, T̃] = {S, T} ⊗ iσ₃`.
pub fn double(pair: &OperatorPair) -> Result<OperatorPair, WeakpairError> {
    pair.require(BracketKind::Anticommutator)?;
    let [s1, s2, _] = pauli();
    OperatorPair::new(pair.s.kron(&s1), pair.t.kron(&s2), BracketKind::Commutator)
}

/// `A_n = -n² (S - in)^{-1} (T - in)^{-1}`.
pub fn approx_identity(pair: &OperatorPair, n: f64) -> Result<CMatrix, WeakpairError> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(WeakpairError::BadParameter { value: n });
    }
    let z = Complex64::new(0.0, -n);
    let rs = resolvent(&pair.s, z).map_err(|source| WeakpairError::SingularAt { lambda: z, source })?;
    let rt = resolvent(&pair.t, z).map_err(|source| WeakpairError::SingularAt { lambda: z, source })?;
    Ok(rs.matmul(&rt).scale_real(-n * n))
}
