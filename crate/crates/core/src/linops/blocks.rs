use num_complex::Complex64;

use super::{CMatrix, LinopsError};

/// Block-diagonal matrix with uniform square blocks.
///
/// Site-local operators on a lattice (one block per site) are stored this way
/// so conjugating a dense operator costs `O(dim² · block)` instead of two
/// dense products. A dense matrix is the one-block special case.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockDiagonal {
    block: usize,
    blocks: Vec<CMatrix>,
}

impl BlockDiagonal {
    pub fn new(blocks: Vec<CMatrix>) -> Result<Self, LinopsError> {
        let first = blocks.first().ok_or(LinopsError::EmptyShape { rows: 0, cols: 0 })?;
        let block = first.rows();
        for b in &blocks {
            if !b.is_square() {
                return Err(LinopsError::NotSquare {
                    rows: b.rows(),
                    cols: b.cols(),
                });
            }
            if b.rows() != block {
                return Err(LinopsError::DimensionMismatch {
                    left: block,
                    right: b.rows(),
                });
            }
        }
        Ok(Self { block, blocks })
    }

    pub fn dim(&self) -> usize {
        self.block * self.blocks.len()
    }

    pub fn block_size(&self) -> usize {
        self.block
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        let d = self.block;
        for (k, b) in self.blocks.iter().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    out[(k * d + i, k * d + j)] = b[(i, j)];
                }
            }
        }
        out
    }

    /// `B M`.
    pub fn left_mul(&self, m: &CMatrix) -> CMatrix {
        assert_eq!(m.rows(), self.dim(), "left_mul shape mismatch");
        if self.blocks.len() == 1 {
            return self.blocks[0].matmul(m);
        }
        let d = self.block;
        let cols = m.cols();
        let mut out = CMatrix::zeros(m.rows(), cols);
        for (k, b) in self.blocks.iter().enumerate() {
            for i in 0..d {
                let row = k * d + i;
                for s in 0..d {
                    let coef = b[(i, s)];
                    if coef == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let src = m.row(k * d + s);
                    let dst = &mut out.data_mut()[row * cols..(row + 1) * cols];
                    for (o, v) in dst.iter_mut().zip(src) {
                        *o += coef * v;
                    }
                }
            }
        }
        out
    }

    /// `M B`.
    pub fn right_mul(&self, m: &CMatrix) -> CMatrix {
        assert_eq!(m.cols(), self.dim(), "right_mul shape mismatch");
        if self.blocks.len() == 1 {
            return m.matmul(&self.blocks[0]);
        }
        let d = self.block;
        let cols = m.cols();
        let mut out = CMatrix::zeros(m.rows(), cols);
        for r in 0..m.rows() {
            let src = m.row(r);
            let dst = &mut out.data_mut()[r * cols..(r + 1) * cols];
            for (k, b) in self.blocks.iter().enumerate() {
                for j in 0..d {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for s in 0..d {
                        acc += src[k * d + s] * b[(s, j)];
                    }
                    dst[k * d + j] = acc;
                }
            }
        }
        out
    }

    /// `B M B`.
    pub fn sandwich(&self, m: &CMatrix) -> CMatrix {
        self.right_mul(&self.left_mul(m))
    }

    pub fn adjoint(&self) -> Self {
        Self {
            block: self.block,
            blocks: self.blocks.iter().map(CMatrix::adjoint).collect(),
        }
    }

    /// Largest per-block `‖B - B*‖_F` and `‖B² - I‖_F`.
    pub fn symmetry_residuals(&self) -> (f64, f64) {
        let id = CMatrix::identity(self.block);
        self.blocks.iter().fold((0.0_f64, 0.0_f64), |(h, u), b| {
            let herm = b.hermiticity_residual();
            let unit = (&b.matmul(b) - &id).fro_norm();
            (h.max(herm), u.max(unit))
        })
    }
}

impl From<CMatrix> for BlockDiagonal {
    fn from(m: CMatrix) -> Self {
        assert!(m.is_square(), "block-diagonal view of a non-square matrix");
        Self {
            block: m.rows(),
            blocks: vec![m],
        }
    }
}
