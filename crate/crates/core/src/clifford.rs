//! Complex Clifford generators and the fundamental symmetry `Γ₁`.
//!
//! Conventions: every generator is anti-hermitian and squares to `-1`, so a
//! unit vector `v` gives `γ(v)² = -|v|²` and `γ(v)* = -γ(v)`.
//!
//! The generators come from the iterated doubling construction. With
//! `m = ⌊n/2⌋`, the pair `(2j-1, 2j)` maps to
//! `σ₃^{⊗(j-1)} ⊗ (iσ₁ | iσ₂) ⊗ I^{⊗(m-j)}`, and for odd `n` the last
//! generator is `i σ₃^{⊗m}`. The fibre dimension is `2^m`.
//!
//! The fundamental symmetry of an oriented rank-`n₁` subbundle with local
//! orthonormal frame `e₁..e_{n₁}` is
//!
//! ```text
//! Γ₁ = i^k γ(e₁)⋯γ(e_{n₁}),   k = n₁(n₁+1)/2.
//! ```
//!
//! The often-quoted real prefactor `(-1)^k` agrees with `i^k` up to sign
//! when `k` is even; for `n₁ ≡ 1, 2 (mod 4)` only the imaginary power yields
//! a self-adjoint unitary. Reports carry the convention string
//! [`GAMMA1_PREFACTOR_CONVENTION`].

use num_complex::Complex64;
use serde::Serialize;

use crate::linops::CMatrix;

/// Largest generator count accepted by [`gamma_matrices`].
pub const MAX_GENERATORS: usize = 12;

/// Tolerance for the Clifford relations and the `Γ₁` identities.
pub const CLIFFORD_TOL: f64 = 1e-12;

pub const GAMMA1_PREFACTOR_CONVENTION: &str = "i^k";

#[derive(Debug, thiserror::Error)]
pub enum CliffordError {
    #[error("at least one generator is required")]
    NoGenerators,
    #[error("{n} generators exceed the cap of {MAX_GENERATORS}")]
    TooLarge { n: usize },
    #[error("vector or frame has dimension {found}, representation has {expected} generators")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("split ({n1}, {n2}) does not add up to {n}")]
    BadSplit { n1: usize, n2: usize, n: usize },
    #[error("frame is not orthonormal (residual {residual:e})")]
    NotOrthonormal { residual: f64 },
    #[error("generator {index}: Γ₁γΓ₁ = {measured}·γ expected sign {expected} (residual {residual:e})")]
    SignMismatch {
        index: usize,
        expected: i8,
        measured: i8,
        residual: f64,
    },
}

/// Generators `γ₁..γ_n` acting on a fibre of dimension `2^⌊n/2⌋`.
#[derive(Clone, Debug)]
pub struct CliffordRep {
    n: usize,
    dim: usize,
    gammas: Vec<CMatrix>,
}

impl CliffordRep {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Spinor fibre dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gammas(&self) -> &[CMatrix] {
        &self.gammas
    }

    pub fn gamma(&self, j: usize) -> &CMatrix {
        &self.gammas[j]
    }
}

/// Ranks of the orthogonal decomposition `E₁ ⊕ E₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct SignatureSplit {
    pub n1: usize,
    pub n2: usize,
}

impl SignatureSplit {
    pub fn new(n1: usize, n2: usize) -> Self {
        Self { n1, n2 }
    }

    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    /// `(-1)^{n₁}`.
    pub fn parity(&self) -> f64 {
        if self.n1 % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn check(&self, n: usize) -> Result<(), CliffordError> {
        if self.n() != n {
            return Err(CliffordError::BadSplit {
                n1: self.n1,
                n2: self.n2,
                n,
            });
        }
        Ok(())
    }
}

/// Real `n x n` matrix whose columns are the frame vectors `e₁..e_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    n: usize,
    /// Row-major; column `j` is `e_{j+1}`.
    entries: Vec<f64>,
}

impl Frame {
    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Self { n, entries }
    }

    /// Row-major entries; panics if the length is not `n²`.
    pub fn from_row_major(n: usize, entries: Vec<f64>) -> Self {
        assert_eq!(entries.len(), n * n, "frame needs n² entries");
        Self { n, entries }
    }

    /// Identity frame rotated by `theta` in the coordinate plane `(p, q)`:
    /// `e_p = cos θ ê_p + sin θ ê_q`, `e_q = -sin θ ê_p + cos θ ê_q`.
    pub fn plane_rotation(n: usize, p: usize, q: usize, theta: f64) -> Self {
        let mut f = Self::identity(n);
        let (s, c) = theta.sin_cos();
        f.entries[p * n + p] = c;
        f.entries[q * n + p] = s;
        f.entries[p * n + q] = -s;
        f.entries[q * n + q] = c;
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n + col]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    /// `F G` (frames compose by matrix product).
    pub fn compose(&self, other: &Frame) -> Frame {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum();
            }
        }
        Frame { n, entries }
    }

    /// `max |FᵀF - I|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for a in 0..n {
            for b in 0..n {
                let dot: f64 = (0..n).map(|i| self.get(i, a) * self.get(i, b)).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Orthogonal projector onto the span of the first `n1` columns, row-major.
    pub fn projector(&self, n1: usize) -> Vec<f64> {
        let n = self.n;
        let mut p = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                p[a * n + b] = (0..n1).map(|j| self.get(a, j) * self.get(b, j)).sum();
            }
        }
        p
    }
}

pub(crate) fn pauli() -> [CMatrix; 3] {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        CMatrix::from_rows(&[vec![z, one], vec![one, z]]),
        CMatrix::from_rows(&[vec![z, -i], vec![i, z]]),
        CMatrix::from_rows(&[vec![one, z], vec![z, -one]]),
    ]
}

fn kron_all(factors: &[&CMatrix]) -> CMatrix {
    factors.iter().fold(CMatrix::identity(1), |acc, f| acc.kron(f))
}

/// Builds `γ₁..γ_n` by iterated doubling.
pub fn gamma_matrices(n: usize) -> Result<CliffordRep, CliffordError> {
    if n == 0 {
        return Err(CliffordError::NoGenerators);
    }
    if n > MAX_GENERATORS {
        return Err(CliffordError::TooLarge { n });
    }
    let m = n / 2;
    let [s1, s2, s3] = pauli();
    let id2 = CMatrix::identity(2);
    let i = Complex64::new(0.0, 1.0);
    let is1 = s1.scale(i);
    let is2 = s2.scale(i);

    let mut gammas = Vec::with_capacity(n);
    for j in 0..m {
        for middle in [&is1, &is2] {
            let mut factors: Vec<&CMatrix> = Vec::with_capacity(m);
            factors.extend(std::iter::repeat_n(&s3, j));
            factors.push(middle);
            factors.extend(std::iter::repeat_n(&id2, m - j - 1));
            gammas.push(kron_all(&factors));
        }
    }
    if n % 2 == 1 {
        let factors: Vec<&CMatrix> = std::iter::repeat_n(&s3, m).collect();
        gammas.push(kron_all(&factors).scale(i));
    }
    Ok(CliffordRep { n, dim: 1 << m, gammas })
}

/// `γ(v) = Σ_j v_j γ_j`.
pub fn gamma_of_vector(rep: &CliffordRep, v: &[f64]) -> Result<CMatrix, CliffordError> {
    if v.len() != rep.n {
        return Err(CliffordError::DimensionMismatch {
            expected: rep.n,
            found: v.len(),
        });
    }
    let mut out = CMatrix::zeros(rep.dim, rep.dim);
    for (g, &c) in rep.gammas.iter().zip(v) {
        if c != 0.0 {
            out = &out + &g.scale_real(c);
        }
    }
    Ok(out)
}

/// `i^k` for integer `k`.
fn i_power(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn check_frame(rep: &CliffordRep, split: SignatureSplit, frame: &Frame) -> Result<(), CliffordError> {
    split.check(rep.n)?;
    if frame.n() != rep.n {
        return Err(CliffordError::DimensionMismatch {
            expected: rep.n,
            found: frame.n(),
        });
    }
    let residual = frame.orthonormality_residual();
    if residual > CLIFFORD_TOL {
        return Err(CliffordError::NotOrthonormal { residual });
    }
    Ok(())
}

/// `Γ₁ = i^k γ(e₁)⋯γ(e_{n₁})`; the identity when `n₁ = 0`.
pub fn fundamental_symmetry(rep: &CliffordRep, split: SignatureSplit, frame: &Frame) -> Result<CMatrix, CliffordError> {
    check_frame(rep, split, frame)?;
    Ok(fundamental_symmetry_unchecked(rep, split.n1, frame))
}

pub(crate) fn fundamental_symmetry_unchecked(rep: &CliffordRep, n1: usize, frame: &Frame) -> CMatrix {
    let k = n1 * (n1 + 1) / 2;
    let mut prod = CMatrix::identity(rep.dim);
    for j in 0..n1 {
        let g = gamma_of_vector(rep, &frame.column(j)).expect("frame size checked");
        prod = prod.matmul(&g);
    }
    prod.scale(i_power(k))
}

/// Signs `s_j` with `Γ₁ γ(e_j) Γ₁ = s_j γ(e_j)`: `(-1)^{n₁-1}` inside `E₁`,
/// `(-1)^{n₁}` in `E₂`. Each sign is measured and compared.
pub fn conjugation_signs(rep: &CliffordRep, split: SignatureSplit, frame: &Frame) -> Result<Vec<i8>, CliffordError> {
    let gamma1 = fundamental_symmetry(rep, split, frame)?;
    let n1 = split.n1;
    (0..rep.n)
        .map(|j| {
            let expected: i8 = match (j < n1, n1 % 2) {
                (true, 1) | (false, 0) => 1,
                _ => -1,
            };
            let g = gamma_of_vector(rep, &frame.column(j))?;
            let conj = gamma1.matmul(&g).matmul(&gamma1);
            let plus = (&conj - &g).fro_norm();
            let minus = (&conj + &g).fro_norm();
            let measured: i8 = if plus <= minus { 1 } else { -1 };
            let residual = plus.min(minus);
            if measured != expected || residual > CLIFFORD_TOL * g.fro_norm().max(1.0) {
                return Err(CliffordError::SignMismatch {
                    index: j,
                    expected,
                    measured,
                    residual,
                });
            }
            Ok(expected)
        })
        .collect()
}

/// Worst-case residuals of the Clifford relations.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct RelationResiduals {
    /// `max_j ‖γ_j* + γ_j‖_F`
    pub anti_hermitian: f64,
    /// `max_j ‖γ_j² + I‖_F`
    pub square: f64,
    /// `max_{j≠k} ‖γ_jγ_k + γ_kγ_j‖_F`
    pub anticommutator: f64,
    /// Number of identities checked, `n + n + n(n-1)/2`.
    pub identities: usize,
}

impl RelationResiduals {
    pub fn max(&self) -> f64 {
        self.anti_hermitian.max(self.square).max(self.anticommutator)
    }
}

pub fn relation_residuals(rep: &CliffordRep) -> RelationResiduals {
    let id = CMatrix::identity(rep.dim);
    let mut r = RelationResiduals {
        anti_hermitian: 0.0,
        square: 0.0,
        anticommutator: 0.0,
        identities: 0,
    };
    for (j, g) in rep.gammas.iter().enumerate() {
        r.anti_hermitian = r.anti_hermitian.max((&g.adjoint() + g).fro_norm());
        r.square = r.square.max((&g.matmul(g) + &id).fro_norm());
        r.identities += 2;
        for h in &rep.gammas[j + 1..] {
            r.anticommutator = r.anticommutator.max(g.anticommutator(h).fro_norm());
            r.identities += 1;
        }
    }
    r
}

/// `(‖Γ - Γ*‖_F, ‖Γ² - I‖_F)`.
pub fn symmetry_residuals(gamma1: &CMatrix) -> (f64, f64) {
    let id = CMatrix::identity(gamma1.rows());
    (gamma1.hermiticity_residual(), (&gamma1.matmul(gamma1) - &id).fro_norm())
}
