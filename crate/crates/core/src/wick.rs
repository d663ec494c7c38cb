//! Real and imaginary parts of a general operator and the Wick rotation
//! `D ↦ (D₊, D₋) = (Re D + Im D, Re D - Im D)` with its inverse
//! `(D₁, D₂) ↦ ½(D₁ + D₂) + (i/2)(D₁ - D₂)`.
//!
//! Matrix-level versions of the indefinite-module conditions are collected
//! in [`check_indefinite_module`]; multiplication operators are even and the
//! operator is odd, so ungraded commutators are used throughout.
//!
//! Residual norms are Frobenius norms.

use num_complex::Complex64;
use serde::Serialize;

use crate::lattice::TorusModel;
use crate::linops::{herm_eigvals, op_norm, BlockDiagonal, CMatrix, LinopsError, HERMITIAN_TOL};
use crate::weakpair::{self, fitted_rate, BracketKind, OperatorPair, WeakpairError};

#[derive(Debug, thiserror::Error)]
pub enum WickError {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("{which} is not hermitian (residual {residual:e})")]
    NotHermitian { which: &'static str, residual: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error(transparent)]
    Weakpair(#[from] WeakpairError),
    #[error(transparent)]
    Linops(#[from] LinopsError),
}

/// `D` with `Re D`, `Im D`, `D₊`, `D₋`.
#[derive(Clone, Debug)]
pub struct WickQuadruple {
    pub d: CMatrix,
    pub re_d: CMatrix,
    pub im_d: CMatrix,
    pub d_plus: CMatrix,
    pub d_minus: CMatrix,
}

pub fn wick_rotate(d: &CMatrix) -> Result<WickQuadruple, WickError> {
    if !d.is_square() {
        return Err(WickError::NotSquare {
            rows: d.rows(),
            cols: d.cols(),
        });
    }
    let da = d.adjoint();
    let re_d = (d + &da).scale_real(0.5);
    let im_d = (d - &da).scale(Complex64::new(0.0, -0.5));
    let d_plus = &re_d + &im_d;
    let d_minus = &re_d - &im_d;
    Ok(WickQuadruple {
        d: d.clone(),
        re_d,
        im_d,
        d_plus,
        d_minus,
    })
}

fn check_hermitian(m: &CMatrix, which: &'static str) -> Result<(), WickError> {
    if !m.is_square() {
        return Err(WickError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let residual = m.hermiticity_residual();
    if residual > HERMITIAN_TOL * m.fro_norm() {
        return Err(WickError::NotHermitian { which, residual });
    }
    Ok(())
}

/// `½(D₁ + D₂) + (i/2)(D₁ - D₂)`.
pub fn reverse_wick(d1: &CMatrix, d2: &CMatrix) -> Result<CMatrix, WickError> {
    check_hermitian(d1, "D1")?;
    check_hermitian(d2, "D2")?;
    if d1.rows() != d2.rows() {
        return Err(WickError::DimensionMismatch {
            left: d1.rows(),
            right: d2.rows(),
        });
    }
    let sum = (d1 + d2).scale_real(0.5);
    let diff = (d1 - d2).scale(Complex64::new(0.0, 0.5));
    Ok(&sum + &diff)
}

/// `‖reverse_wick(D₊, D₋) - D‖`.
pub fn roundtrip_residual(d: &CMatrix) -> Result<f64, WickError> {
    let q = wick_rotate(d)?;
    let back = reverse_wick(&q.d_plus, &q.d_minus)?;
    Ok((&back - d).fro_norm())
}

/// `max(‖D₊ - D₁‖, ‖D₋ - D₂‖)` for `D = reverse_wick(D₁, D₂)`.
pub fn roundtrip_residual_pair(d1: &CMatrix, d2: &CMatrix) -> Result<f64, WickError> {
    let q = wick_rotate(&reverse_wick(d1, d2)?)?;
    Ok((&q.d_plus - d1).fro_norm().max((&q.d_minus - d2).fro_norm()))
}

/// `½(D₁ + D₂) + (i/2)(D₁ - D₂)` for the lattice pieces, so that
/// `Re D = ½(D₁ + D₂)` and `Im D = ½(D₁ - D₂)`.
pub fn lattice_operator(model: &TorusModel) -> Result<CMatrix, WickError> {
    reverse_wick(&model.d1.to_dense(), &model.d2.to_dense())
}

pub const COMPACTNESS_CAVEAT: &str = "finite-dimensional proxy: eigenvalues of (I + ReD^2 + ImD^2)^(-1/2); \
compactness is read off from stabilisation of the leading values under refinement, not from a single size";

#[derive(Clone, Debug, Serialize)]
pub struct ModuleCheckReport {
    pub re_hermitian_residual: f64,
    pub im_hermitian_residual: f64,
    /// Optimal relative-bound constant of `{Re D, Im D}`.
    pub c_anticommute: f64,
    /// `‖[D, M_f]‖` per multiplier.
    pub commutator_norms: Vec<f64>,
    /// Eigenvalues of `(I + Re D² + Im D²)^{-1/2}`, descending.
    pub proxy_eigs: Vec<f64>,
    /// Fitted log-log slope of `proxy_eigs` against the mode index.
    pub proxy_decay_rate: Option<f64>,
    pub caveat: &'static str,
}

impl ModuleCheckReport {
    pub fn proxy_head(&self, k: usize) -> &[f64] {
        &self.proxy_eigs[..k.min(self.proxy_eigs.len())]
    }
}

pub fn check_indefinite_module(d: &CMatrix, multipliers: &[BlockDiagonal]) -> Result<ModuleCheckReport, WickError> {
    let q = wick_rotate(d)?;
    let pair = OperatorPair::new(q.re_d.clone(), q.im_d.clone(), BracketKind::Anticommutator)?;
    let c_anticommute = weakpair::condition1_constant(&pair)?;
    let commutator_norms = multipliers
        .iter()
        .map(|m| {
            if m.dim() != d.rows() {
                return Err(WickError::DimensionMismatch {
                    left: d.rows(),
                    right: m.dim(),
                });
            }
            Ok(op_norm(&(&m.right_mul(d) - &m.left_mul(d))))
        })
        .collect::<Result<Vec<_>, _>>()?;
    // ascending eigenvalues of G give descending values of G^{-1/2}
    let proxy_eigs: Vec<f64> = herm_eigvals(pair.gram())?.into_iter().map(|g| 1.0 / g.sqrt()).collect();
    let rows: Vec<(f64, f64)> = proxy_eigs
        .iter()
        .enumerate()
        .map(|(k, &v)| ((k + 1) as f64, v))
        .collect();
    Ok(ModuleCheckReport {
        re_hermitian_residual: q.re_d.hermiticity_residual(),
        im_hermitian_residual: q.im_d.hermiticity_residual(),
        c_anticommute,
        commutator_norms,
        proxy_decay_rate: fitted_rate(&rows),
        proxy_eigs,
        caveat: COMPACTNESS_CAVEAT,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PairCheckReport {
    pub sum_hermitian_residual: f64,
    pub diff_hermitian_residual: f64,
    /// Optimal relative-bound constant of `{D₁ + D₂, D₁ - D₂}`.
    pub c: f64,
}

pub fn check_pair(d1: &CMatrix, d2: &CMatrix) -> Result<PairCheckReport, WickError> {
    check_hermitian(d1, "D1")?;
    check_hermitian(d2, "D2")?;
    if d1.rows() != d2.rows() {
        return Err(WickError::DimensionMismatch {
            left: d1.rows(),
            right: d2.rows(),
        });
    }
    let sum = d1 + d2;
    let diff = d1 - d2;
    let out = PairCheckReport {
        sum_hermitian_residual: sum.hermiticity_residual(),
        diff_hermitian_residual: diff.hermiticity_residual(),
        c: 0.0,
    };
    let pair = OperatorPair::new(sum, diff, BracketKind::Anticommutator)?;
    Ok(PairCheckReport {
        c: weakpair::condition1_constant(&pair)?,
        ..out
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::pauli;
    use crate::random;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hermitian_input_has_no_imaginary_part() {
        let mut rng = random::rng(1);
        let h = random::hermitian(8, &mut rng);
        let q = wick_rotate(&h).unwrap();
        assert!(q.im_d.max_abs() <= 1e-14);
        assert!((&q.d_plus - &h).max_abs() < 1e-14 && (&q.d_minus - &h).max_abs() < 1e-14);
        assert_eq!(reverse_wick(&h, &h).unwrap(), h);
    }

    #[test]
    fn nilpotent_example() {
        let [s1, s2, _] = pauli();
        let d = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let q = wick_rotate(&d).unwrap();
        assert!((&q.re_d - &s1.scale_real(0.5)).max_abs() < 1e-15);
        assert!((&q.im_d - &s2.scale_real(0.5)).max_abs() < 1e-15);
        let dp = (&s1 + &s2).scale_real(0.5);
        let dm = (&s1 - &s2).scale_real(0.5);
        assert!((&q.d_plus - &dp).max_abs() < 1e-15);
        assert!((&q.d_minus - &dm).max_abs() < 1e-15);
        assert!((&reverse_wick(&dp, &dm).unwrap() - &d).max_abs() < 1e-15);
    }

    #[test]
    fn purely_imaginary_operator() {
        let mut rng = random::rng(2);
        let h = random::hermitian(5, &mut rng);
        let q = wick_rotate(&h.scale(c(0.0, 1.0))).unwrap();
        assert!(q.re_d.max_abs() < 1e-15);
        assert!((&q.d_plus - &h).max_abs() < 1e-14);
        assert!((&q.d_minus + &h).max_abs() < 1e-14);
        let back = reverse_wick(&h, &h.scale_real(-1.0)).unwrap();
        assert!((&back - &h.scale(c(0.0, 1.0))).max_abs() < 1e-14);
    }

    #[test]
    fn reverse_wick_validates() {
        let m = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(
            reverse_wick(&m, &CMatrix::identity(2)),
            Err(WickError::NotHermitian { which: "D1", .. })
        ));
        assert!(matches!(
            reverse_wick(&CMatrix::identity(2), &CMatrix::identity(3)),
            Err(WickError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            wick_rotate(&CMatrix::zeros(2, 3)),
            Err(WickError::NotSquare { .. })
        ));
    }

    #[test]
    fn zero_operator_report() {
        let d = CMatrix::zeros(4, 4);
        let f = BlockDiagonal::from(CMatrix::from_real_diag(&[1.0, 2.0, 3.0, 4.0]));
        let r = check_indefinite_module(&d, &[f]).unwrap();
        assert_eq!(r.c_anticommute, 0.0);
        assert_eq!(r.commutator_norms, vec![0.0]);
        assert!(r.proxy_eigs.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn pair_checks() {
        let [s1, s2, _] = pauli();
        let d1 = (&s1 + &s2).scale_real(0.5);
        let d2 = (&s1 - &s2).scale_real(0.5);
        assert!(check_pair(&d1, &d2).unwrap().c < 1e-14);
        // D₂ = 0: sum and difference coincide, the anticommutator is 2D₁²
        let mut rng = random::rng(3);
        let h = random::hermitian(6, &mut rng);
        let r = check_pair(&h, &CMatrix::zeros(6, 6)).unwrap();
        let eig = crate::linops::herm_eig(&h).unwrap();
        let direct = eig
            .values
            .iter()
            .map(|t| 4.0 * t.powi(4) / (1.0 + 2.0 * t * t))
            .fold(0.0, f64::max);
        assert!((r.c - direct).abs() < 1e-9 * (1.0 + direct));
    }
}
