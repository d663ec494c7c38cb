//! Flat-torus lattice Dirac operators and their splitting by a
//! position-dependent fundamental symmetry.
//!
//! Sites are indexed `site = Σ_a x_a N^a` (axis 0 varies fastest) and the
//! spinor index is innermost, so the full index is `site · d + s` and
//! `D = Σ_a D_a ⊗ γ_a` in Kronecker order. Axes are 0-based throughout
//! the Rust API.
//!
//! Lattice operators are nearest-neighbour stencils and are stored as
//! [`BlockSparse`] with one `d x d` tile per site pair; `to_dense` gives
//! the plain matrix.

mod experiment;
mod split;

use num_complex::Complex64;
use serde::Serialize;

use crate::clifford::{self, CliffordError, CliffordRep, Frame, SignatureSplit};
use crate::linops::{BlockDiagonal, BlockSparse, CMatrix, LinopsError};

pub use experiment::{lattice_row, LatticeRow, BOUND_SLACK};
pub use split::{relative_bound_norm, split_first_order, split_first_order_dense, FirstOrderSplit};

/// Cap on `fibre · N^n`.
pub const MAX_OPERATOR_DIM: usize = 8192;

/// Tolerance for hermiticity and the `Γ₁` identities.
pub const LATTICE_TOL: f64 = 1e-12;

/// Relative off-stencil mass accepted by [`split_first_order`].
pub const STENCIL_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum LatticeError {
    #[error("points per axis must be even and at least 4, got {points}")]
    BadPoints { points: usize },
    #[error("space dimension must be positive")]
    NoAxes,
    #[error("operator dimension {dim} exceeds the cap of {MAX_OPERATOR_DIM}")]
    TooLarge { dim: usize },
    #[error("axis {axis} out of range for a {n}-dimensional torus")]
    BadAxis { axis: usize, n: usize },
    #[error("rotation plane ({p}, {q}) must satisfy p < n1 <= q < n (n1 = {n1}, n = {n})")]
    BadRotPlane { p: usize, q: usize, n1: usize, n: usize },
    #[error("alpha must be finite, got {alpha}")]
    BadAlpha { alpha: f64 },
    #[error("Γ₁ is not a symmetry: hermiticity residual {hermitian:e}, unitarity residual {unitary:e}")]
    NotSymmetry { hermitian: f64, unitary: f64 },
    #[error("operator is not first order: relative off-stencil mass {ratio:e}")]
    NotFirstOrder { ratio: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Clifford(#[from] CliffordError),
    #[error(transparent)]
    Linops(#[from] LinopsError),
    #[error(transparent)]
    Weakpair(#[from] crate::weakpair::WeakpairError),
}

/// `N^n` grid on the flat torus `(ℝ/2πℤ)^n` with spacing `h = 2π/N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TorusLattice {
    n: usize,
    points: usize,
    h: f64,
}

impl TorusLattice {
    pub fn new(n: usize, points: usize) -> Result<Self, LatticeError> {
        if n == 0 {
            return Err(LatticeError::NoAxes);
        }
        if points < 4 || points % 2 != 0 {
            return Err(LatticeError::BadPoints { points });
        }
        Ok(Self {
            n,
            points,
            h: 2.0 * std::f64::consts::PI / points as f64,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn sites(&self) -> usize {
        self.points.pow(self.n as u32)
    }

    pub fn coords(&self, site: usize) -> Vec<usize> {
        let mut rest = site;
        (0..self.n)
            .map(|_| {
                let c = rest % self.points;
                rest /= self.points;
                c
            })
            .collect()
    }

    pub fn site(&self, coords: &[usize]) -> usize {
        coords.iter().rev().fold(0, |acc, &c| acc * self.points + c)
    }

    /// Site reached from `site` by the integer offset `delta`, with wrap-around.
    pub fn offset(&self, site: usize, delta: &[isize]) -> usize {
        let np = self.points as isize;
        let coords: Vec<usize> = self
            .coords(site)
            .iter()
            .zip(delta)
            .map(|(&c, &d)| (c as isize + d).rem_euclid(np) as usize)
            .collect();
        self.site(&coords)
    }

    /// Coordinate of `site` along `axis`, in `[0, 2π)`.
    pub fn position(&self, site: usize, axis: usize) -> f64 {
        let stride = self.points.pow(axis as u32);
        ((site / stride) % self.points) as f64 * self.h
    }

    /// Offset from `from` to `to`, each component wrapped into `(-N/2, N/2]`.
    pub fn wrapped_offset(&self, from: usize, to: usize) -> Vec<isize> {
        let np = self.points as isize;
        self.coords(from)
            .iter()
            .zip(self.coords(to))
            .map(|(&a, b)| {
                let d = (b as isize - a as isize).rem_euclid(np);
                if d > np / 2 {
                    d - np
                } else {
                    d
                }
            })
            .collect()
    }

    fn check_dim(&self, fibre: usize) -> Result<usize, LatticeError> {
        let dim = fibre * self.sites();
        if dim > MAX_OPERATOR_DIM {
            return Err(LatticeError::TooLarge { dim });
        }
        Ok(dim)
    }

    fn check_axis(&self, axis: usize) -> Result<(), LatticeError> {
        if axis >= self.n {
            return Err(LatticeError::BadAxis { axis, n: self.n });
        }
        Ok(())
    }
}

/// Frame adapted to `E₁ ⊕ E₂`, rotated in the plane `(p, q)` by
/// `θ(x) = alpha · sin(x_dep)`. Without a rotation plane the frame is the
/// coordinate frame everywhere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrameField {
    pub split: SignatureSplit,
    pub rot_plane: Option<(usize, usize)>,
    pub dep_axis: usize,
    pub alpha: f64,
}

impl FrameField {
    pub fn constant(split: SignatureSplit) -> Self {
        Self {
            split,
            rot_plane: None,
            dep_axis: 0,
            alpha: 0.0,
        }
    }

    pub fn rotating(
        split: SignatureSplit,
        rot_plane: (usize, usize),
        dep_axis: usize,
        alpha: f64,
    ) -> Result<Self, LatticeError> {
        let n = split.n();
        let (p, q) = rot_plane;
        if !(p < split.n1 && split.n1 <= q && q < n) {
            return Err(LatticeError::BadRotPlane { p, q, n1: split.n1, n });
        }
        if dep_axis >= n {
            return Err(LatticeError::BadAxis { axis: dep_axis, n });
        }
        if !alpha.is_finite() {
            return Err(LatticeError::BadAlpha { alpha });
        }
        Ok(Self {
            split,
            rot_plane: Some(rot_plane),
            dep_axis,
            alpha,
        })
    }

    pub fn theta(&self, lat: &TorusLattice, site: usize) -> f64 {
        match self.rot_plane {
            Some(_) => self.alpha * lat.position(site, self.dep_axis).sin(),
            None => 0.0,
        }
    }

    pub fn frame_at(&self, lat: &TorusLattice, site: usize) -> Frame {
        let n = self.split.n();
        match self.rot_plane {
            Some((p, q)) => Frame::plane_rotation(n, p, q, self.theta(lat, site)),
            None => Frame::identity(n),
        }
    }
}

/// Periodic central difference along `axis` on scalar lattice functions,
/// `(ψ(x + h e_a) - ψ(x - h e_a)) / 2h`.
pub fn difference_op(lat: &TorusLattice, axis: usize) -> Result<CMatrix, LatticeError> {
    lat.check_axis(axis)?;
    Ok(difference_stencil(lat, axis, &CMatrix::identity(1)).to_dense())
}

/// `D_a ⊗ c` for a fibre matrix `c`.
fn difference_stencil(lat: &TorusLattice, axis: usize, c: &CMatrix) -> BlockSparse {
    let w = 0.5 / lat.h();
    let forward = c.scale_real(w);
    let backward = c.scale_real(-w);
    let mut e = vec![0isize; lat.n()];
    let mut out = BlockSparse::zeros(lat.sites(), c.rows());
    for x in 0..lat.sites() {
        e[axis] = 1;
        out.add_block(x, lat.offset(x, &e), &forward);
        e[axis] = -1;
        out.add_block(x, lat.offset(x, &e), &backward);
    }
    out
}

fn check_rep(lat: &TorusLattice, rep: &CliffordRep) -> Result<usize, LatticeError> {
    if rep.n() != lat.n() {
        return Err(LatticeError::DimensionMismatch {
            expected: lat.n(),
            found: rep.n(),
        });
    }
    lat.check_dim(rep.dim())
}

/// `D = Σ_a D_a ⊗ γ_a`.
pub fn build_dirac(lat: &TorusLattice, rep: &CliffordRep) -> Result<BlockSparse, LatticeError> {
    check_rep(lat, rep)?;
    let mut d = BlockSparse::zeros(lat.sites(), rep.dim());
    for a in 0..lat.n() {
        d = &d + &difference_stencil(lat, a, rep.gamma(a));
    }
    Ok(d)
}

/// `Σ_j γ(e_j(x)) ∇_{e_j}` with `∇_{e_j} = Σ_a e_j^a(x) D_a`, assembled from
/// the moving frame. Agrees with [`build_dirac`] for every orthonormal frame.
pub fn build_dirac_in_frame(
    lat: &TorusLattice,
    rep: &CliffordRep,
    frame: &FrameField,
) -> Result<BlockSparse, LatticeError> {
    check_rep(lat, rep)?;
    let n = lat.n();
    let w = 0.5 / lat.h();
    let mut d = BlockSparse::zeros(lat.sites(), rep.dim());
    let mut e = vec![0isize; n];
    for x in 0..lat.sites() {
        let f = frame.frame_at(lat, x);
        for j in 0..n {
            let col = f.column(j);
            let g = clifford::gamma_of_vector(rep, &col)?;
            for (a, &coef) in col.iter().enumerate() {
                if coef == 0.0 {
                    continue;
                }
                e[a] = 1;
                d.add_block(x, lat.offset(x, &e), &g.scale_real(coef * w));
                e[a] = -1;
                d.add_block(x, lat.offset(x, &e), &g.scale_real(-coef * w));
                e[a] = 0;
            }
        }
    }
    Ok(d)
}

/// Site-wise `Γ₁(x) = i^k γ(e₁(x))⋯γ(e_{n₁}(x))`.
pub fn build_gamma1_field(
    lat: &TorusLattice,
    rep: &CliffordRep,
    frame: &FrameField,
) -> Result<BlockDiagonal, LatticeError> {
    check_rep(lat, rep)?;
    if frame.split.n() != lat.n() {
        return Err(LatticeError::DimensionMismatch {
            expected: lat.n(),
            found: frame.split.n(),
        });
    }
    let blocks = (0..lat.sites())
        .map(|x| clifford::fundamental_symmetry(rep, frame.split, &frame.frame_at(lat, x)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BlockDiagonal::new(blocks)?)
}

/// `D₁ = ½(D - (-1)^{n₁} Γ₁ D Γ₁)`, `D₂ = D - D₁`.
///
/// `D₁` is rounded onto the binary grid `2^(e-50)`, where `2^e` is the
/// binade of the largest entry of `D`. Every entry of a lattice Dirac
/// operator lies in that binade or is zero, so `D - D₁` is then computed
/// without rounding and `D₁ + D₂` reproduces `D` bit for bit. The rounding
/// moves `D₁` by at most `2^-51` of the largest entry.
pub fn decompose(
    d: &BlockSparse,
    gamma1: &BlockDiagonal,
    split: SignatureSplit,
) -> Result<(BlockSparse, BlockSparse), LatticeError> {
    let (hermitian, unitary) = gamma1.symmetry_residuals();
    if hermitian > LATTICE_TOL || unitary > LATTICE_TOL {
        return Err(LatticeError::NotSymmetry { hermitian, unitary });
    }
    let conj = d.sandwich(gamma1).scale_real(split.parity());
    let d1 = snap_to_grid(&(d - &conj).scale_real(0.5), d.max_abs());
    let d2 = d - &d1;
    Ok((d1, d2))
}

fn snap_to_grid(m: &BlockSparse, scale: f64) -> BlockSparse {
    if scale == 0.0 {
        return m.clone();
    }
    let q = 2f64.powi(scale.log2().floor() as i32 - 50);
    let snap = |v: f64| (v / q).round() * q;
    m.map_entries(|z| Complex64::new(snap(z.re), snap(z.im)))
}

/// Lattice, frame, and the assembled `D`, `Γ₁`, `D₁`, `D₂`.
#[derive(Clone, Debug)]
pub struct TorusModel {
    pub lattice: TorusLattice,
    pub rep: CliffordRep,
    pub frame: FrameField,
    pub d: BlockSparse,
    pub gamma1: BlockDiagonal,
    pub d1: BlockSparse,
    pub d2: BlockSparse,
}

impl TorusModel {
    pub fn build(lattice: TorusLattice, frame: FrameField) -> Result<Self, LatticeError> {
        let rep = clifford::gamma_matrices(lattice.n())?;
        let d = build_dirac(&lattice, &rep)?;
        let gamma1 = build_gamma1_field(&lattice, &rep, &frame)?;
        let (d1, d2) = decompose(&d, &gamma1, frame.split)?;
        Ok(Self {
            lattice,
            rep,
            frame,
            d,
            gamma1,
            d1,
            d2,
        })
    }

    pub fn dim(&self) -> usize {
        self.d.dim()
    }

    /// `{D₁, D₂}`.
    pub fn anticommutator(&self) -> BlockSparse {
        self.d1.anticommutator(&self.d2)
    }

    pub fn residuals(&self) -> DecompositionResiduals {
        let s = self.frame.split.parity();
        let (g_herm, g_unit) = self.gamma1.symmetry_residuals();
        let sum = &(&self.d1 + &self.d2) - &self.d;
        let conj1 = &self.d1.sandwich(&self.gamma1) + &self.d1.scale_real(s);
        let conj2 = &self.d2.sandwich(&self.gamma1) - &self.d2.scale_real(s);
        DecompositionResiduals {
            sum_max_abs: sum.max_abs(),
            d_hermitian: self.d.hermiticity_residual(),
            d1_hermitian: self.d1.hermiticity_residual(),
            d2_hermitian: self.d2.hermiticity_residual(),
            d1_conjugation: conj1.fro_norm(),
            d2_conjugation: conj2.fro_norm(),
            gamma1_hermitian: g_herm,
            gamma1_unitary: g_unit,
        }
    }

    /// Multiplication by a scalar lattice function, tensored with the fibre identity.
    pub fn multiplication(&self, f: impl Fn(&[f64]) -> Complex64) -> BlockDiagonal {
        let d = self.rep.dim();
        let h = self.lattice.h();
        let blocks = (0..self.lattice.sites())
            .map(|x| {
                let pos: Vec<f64> = self.lattice.coords(x).iter().map(|&c| c as f64 * h).collect();
                CMatrix::identity(d).scale(f(&pos))
            })
            .collect();
        BlockDiagonal::new(blocks).expect("uniform blocks")
    }
}

/// Residuals of the decomposition identities; Frobenius norms except
/// `sum_max_abs`, which is exactly zero when `D₁ + D₂ = D` bit for bit.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct DecompositionResiduals {
    pub sum_max_abs: f64,
    pub d_hermitian: f64,
    pub d1_hermitian: f64,
    pub d2_hermitian: f64,
    /// `‖Γ₁D₁Γ₁ + (-1)^{n₁} D₁‖`
    pub d1_conjugation: f64,
    /// `‖Γ₁D₂Γ₁ - (-1)^{n₁} D₂‖`
    pub d2_conjugation: f64,
    pub gamma1_hermitian: f64,
    pub gamma1_unitary: f64,
}

impl DecompositionResiduals {
    pub fn max_hermitian_or_identity(&self) -> f64 {
        [
            self.d_hermitian,
            self.d1_hermitian,
            self.d2_hermitian,
            self.d1_conjugation,
            self.d2_conjugation,
            self.gamma1_hermitian,
            self.gamma1_unitary,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn ok(&self) -> bool {
        self.sum_max_abs == 0.0 && self.max_hermitian_or_identity() <= LATTICE_TOL
    }
}
