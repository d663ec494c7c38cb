use faer::linalg::solvers::DenseSolveCore;
use faer::Side;
use num_complex::Complex64;

use super::{CMatrix, LinopsError, HERMITIAN_TOL};

/// Eigen-decomposition of a hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    /// Columns are the eigenvectors, in the order of `values`.
    pub vectors: CMatrix,
}

impl HermEig {
    /// `‖M - V Λ V*‖_F`.
    pub fn reconstruction_residual(&self, m: &CMatrix) -> f64 {
        let v = &self.vectors;
        let n = v.rows();
        let scaled = CMatrix::from_fn(n, n, |i, j| v[(i, j)] * self.values[j]);
        (&scaled.matmul(&v.adjoint()) - m).fro_norm()
    }

    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.vectors.rows()).map(|i| self.vectors[(i, k)]).collect()
    }
}

/// Largest generalized eigenvalue together with a witness vector.
#[derive(Clone, Debug)]
pub struct GenEigMax {
    pub value: f64,
    /// Satisfies `X v = value * G v`, normalized so that `<v|G v> = 1`.
    pub vector: Vec<Complex64>,
}

fn check_hermitian(m: &CMatrix) -> Result<(), LinopsError> {
    if !m.is_square() {
        return Err(LinopsError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let residual = m.hermiticity_residual();
    let scale = m.fro_norm();
    if residual > HERMITIAN_TOL * scale {
        return Err(LinopsError::NotHermitian { residual, norm: scale });
    }
    Ok(())
}

/// Above this size [`op_norm`] of a non-hermitian matrix goes through
/// `sqrt(λ_max(M*M))` instead of a full SVD.
pub const GRAM_ROUTE_MIN_DIM: usize = 256;

/// Largest singular value.
///
/// Hermitian input (to `1e-14` relative) takes the eigenvalue route,
/// `max |λ|`. Large non-hermitian input uses the top eigenvalue of the Gram
/// matrix: its absolute error is `O(ε‖M‖²)`, so `σ_max` keeps full relative
/// accuracy (only small singular values would suffer).
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.data().iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return 0.0;
    }
    if m.is_square() && m.hermiticity_residual() <= 1e-14 * m.fro_norm() {
        if let Ok(vals) = m.hermitian_part().to_faer().self_adjoint_eigenvalues(Side::Lower) {
            return vals.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        }
    }
    if m.rows().min(m.cols()) >= GRAM_ROUTE_MIN_DIM {
        let gram = if m.cols() <= m.rows() {
            m.adjoint().matmul(m)
        } else {
            m.matmul(&m.adjoint())
        };
        if let Ok(vals) = gram.hermitian_part().to_faer().self_adjoint_eigenvalues(Side::Lower) {
            return vals[vals.len() - 1].max(0.0).sqrt();
        }
    }
    let sv = m
        .to_faer()
        .singular_values()
        .expect("singular value iteration failed to converge");
    sv[0]
}

/// Eigenvalues and eigenvectors of a hermitian matrix. The input is
/// symmetrized before the solve once it passes the hermiticity check.
pub fn herm_eig(m: &CMatrix) -> Result<HermEig, LinopsError> {
    check_hermitian(m)?;
    let evd = m
        .hermitian_part()
        .to_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| LinopsError::NoConvergence)?;
    let values = evd.S().column_vector().iter().map(|z| z.re).collect();
    Ok(HermEig {
        values,
        vectors: CMatrix::from_faer(evd.U()),
    })
}

/// Eigenvalues only, ascending.
pub fn herm_eigvals(m: &CMatrix) -> Result<Vec<f64>, LinopsError> {
    check_hermitian(m)?;
    m.hermitian_part()
        .to_faer()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| LinopsError::NoConvergence)
}

/// Largest `μ` with `det(X - μ G) = 0`.
pub fn gen_eig_max(x: &CMatrix, g: &CMatrix) -> Result<f64, LinopsError> {
    gen_eig_max_solve(x, g, false).map(|r| r.value)
}

/// As [`gen_eig_max`], also returning the generalized eigenvector.
pub fn gen_eig_max_vector(x: &CMatrix, g: &CMatrix) -> Result<GenEigMax, LinopsError> {
    gen_eig_max_solve(x, g, true)
}

fn gen_eig_max_solve(x: &CMatrix, g: &CMatrix, want_vector: bool) -> Result<GenEigMax, LinopsError> {
    check_hermitian(g)?;
    check_hermitian(x)?;
    if x.rows() != g.rows() {
        return Err(LinopsError::DimensionMismatch {
            left: x.rows(),
            right: g.rows(),
        });
    }
    let n = g.rows();
    let g_scale = g.fro_norm();
    let llt = g
        .hermitian_part()
        .to_faer()
        .llt(Side::Lower)
        .map_err(|_| LinopsError::NotPositiveDefinite { pivot: f64::NAN })?;
    let l = llt.L();
    // Cholesky pivots bound the smallest eigenvalue from above.
    let min_pivot = (0..n).map(|i| l[(i, i)].re.powi(2)).fold(f64::INFINITY, f64::min);
    if min_pivot <= 1e-12 * g_scale {
        return Err(LinopsError::NotPositiveDefinite { pivot: min_pivot });
    }

    // Y = L^{-1} X L^{-*}
    let mut z = x.hermitian_part().to_faer();
    l.solve_lower_triangular_in_place(z.as_mut());
    let mut yh = z.adjoint().to_owned();
    l.solve_lower_triangular_in_place(yh.as_mut());
    let y = CMatrix::from_faer(yh.adjoint().to_owned().as_ref()).hermitian_part();

    if !want_vector {
        let vals = y
            .to_faer()
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|_| LinopsError::NoConvergence)?;
        return Ok(GenEigMax {
            value: vals[n - 1],
            vector: Vec::new(),
        });
    }

    let evd = y
        .to_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| LinopsError::NoConvergence)?;
    let value = evd.S().column_vector()[n - 1].re;
    let mut w = evd.U().col(n - 1).to_owned();
    l.adjoint().solve_upper_triangular_in_place(w.as_mat_mut());
    Ok(GenEigMax {
        value,
        vector: w.iter().copied().collect(),
    })
}

/// `(M + z I)^{-1}`.
///
/// Fails with [`LinopsError::Singular`] when the smallest singular value of
/// `M + zI` (estimated from below by `1/‖R‖_F`) falls under
/// `1e-12 (‖M‖_F + |z|)`, or when the inverse residual exceeds `1e-10`.
pub fn resolvent(m: &CMatrix, z: Complex64) -> Result<CMatrix, LinopsError> {
    if !m.is_square() {
        return Err(LinopsError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let a = m.shift_diag(z);
    let fa = a.to_faer();
    let inv = fa.partial_piv_lu().inverse();
    let r = CMatrix::from_faer(inv.as_ref());
    let r_norm = r.fro_norm();
    let sigma_min_est = if r_norm.is_finite() && r_norm > 0.0 {
        1.0 / r_norm
    } else {
        0.0
    };
    let scale = m.fro_norm() + z.norm();
    if sigma_min_est <= 1e-12 * scale || r.data().iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(LinopsError::Singular {
            sigma_min_estimate: sigma_min_est,
        });
    }
    let residual = (&a.matmul(&r) - &CMatrix::identity(m.rows())).fro_norm();
    if residual > 1e-10 {
        return Err(LinopsError::InverseResidual { residual });
    }
    Ok(r)
}

/// Plain inverse, `resolvent(m, 0)`.
pub fn inverse(m: &CMatrix) -> Result<CMatrix, LinopsError> {
    resolvent(m, Complex64::new(0.0, 0.0))
}
