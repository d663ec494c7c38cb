use std::ops::{Add, Sub};

use num_complex::Complex64;

use super::{BlockDiagonal, CMatrix, LinopsError};

/// Square matrix made of `block x block` tiles, storing only the tiles that
/// were written. Lattice stencil operators touch a handful of neighbouring
/// sites per row, so at `N^n` sites this is far smaller than the dense form.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSparse {
    block: usize,
    /// Per block-row, tiles sorted by block-column.
    rows: Vec<Vec<(usize, CMatrix)>>,
}

impl BlockSparse {
    pub fn zeros(nblocks: usize, block: usize) -> Self {
        assert!(nblocks > 0 && block > 0, "empty block-sparse shape");
        Self {
            block,
            rows: vec![Vec::new(); nblocks],
        }
    }

    /// Tiles of `m` that contain a nonzero entry.
    pub fn from_dense(m: &CMatrix, block: usize) -> Result<Self, LinopsError> {
        if !m.is_square() {
            return Err(LinopsError::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        if block == 0 || m.rows() % block != 0 {
            return Err(LinopsError::DimensionMismatch {
                left: m.rows(),
                right: block,
            });
        }
        let nb = m.rows() / block;
        let mut out = Self::zeros(nb, block);
        for bi in 0..nb {
            for bj in 0..nb {
                let tile = CMatrix::from_fn(block, block, |i, j| m[(bi * block + i, bj * block + j)]);
                if tile.max_abs() > 0.0 {
                    out.rows[bi].push((bj, tile));
                }
            }
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.block * self.rows.len()
    }

    pub fn block_size(&self) -> usize {
        self.block
    }

    pub fn nblocks(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[(usize, CMatrix)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&CMatrix> {
        let row = &self.rows[i];
        row.binary_search_by_key(&j, |(c, _)| *c).ok().map(|k| &row[k].1)
    }

    /// Number of stored tiles.
    pub fn nnz_blocks(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// `A[i, j] += tile`.
    pub fn add_block(&mut self, i: usize, j: usize, tile: &CMatrix) {
        debug_assert_eq!((tile.rows(), tile.cols()), (self.block, self.block));
        let row = &mut self.rows[i];
        match row.binary_search_by_key(&j, |(c, _)| *c) {
            Ok(k) => row[k].1 = &row[k].1 + tile,
            Err(k) => row.insert(k, (j, tile.clone())),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &CMatrix)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |(j, t)| (i, *j, t)))
    }

    pub fn to_dense(&self) -> CMatrix {
        let d = self.block;
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for (bi, bj, t) in self.iter() {
            for i in 0..d {
                for j in 0..d {
                    out[(bi * d + i, bj * d + j)] = t[(i, j)];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.nblocks(), self.block);
        for (i, j, t) in self.iter() {
            out.rows[j].push((i, t.adjoint()));
        }
        // rows were filled in increasing `i`, so each is already sorted
        out
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map_tiles(|t| t.scale_real(s))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map_tiles(|t| t.scale(s))
    }

    /// Applies `f` to every stored entry.
    pub fn map_entries(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        self.map_tiles(|t| {
            let mut t = t.clone();
            t.data_mut().iter_mut().for_each(|z| *z = f(*z));
            t
        })
    }

    fn map_tiles(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        Self {
            block: self.block,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|(j, t)| (*j, f(t))).collect())
                .collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Self {
        assert_eq!(
            (self.block, self.nblocks()),
            (other.block, other.nblocks()),
            "shape mismatch"
        );
        let zero = CMatrix::zeros(self.block, self.block);
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut out = Vec::with_capacity(a.len().max(b.len()));
                let (mut ia, mut ib) = (0, 0);
                while ia < a.len() || ib < b.len() {
                    let ca = a.get(ia).map_or(usize::MAX, |e| e.0);
                    let cb = b.get(ib).map_or(usize::MAX, |e| e.0);
                    if ca == cb {
                        out.push((ca, f(&a[ia].1, &b[ib].1)));
                        ia += 1;
                        ib += 1;
                    } else if ca < cb {
                        out.push((ca, f(&a[ia].1, &zero)));
                        ia += 1;
                    } else {
                        out.push((cb, f(&zero, &b[ib].1)));
                        ib += 1;
                    }
                }
                out
            })
            .collect();
        Self {
            block: self.block,
            rows,
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            (self.block, self.nblocks()),
            (rhs.block, rhs.nblocks()),
            "shape mismatch"
        );
        let mut out = Self::zeros(self.nblocks(), self.block);
        for (i, row) in self.rows.iter().enumerate() {
            for (k, a) in row {
                for (j, b) in &rhs.rows[*k] {
                    out.add_block(i, *j, &small_matmul(a, b));
                }
            }
        }
        out
    }

    pub fn anticommutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) + &rhs.matmul(self)
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    /// `B A` for block-diagonal `B` with matching tiles.
    pub fn left_diag(&self, b: &BlockDiagonal) -> Self {
        self.check_diag(b);
        Self {
            block: self.block,
            rows: self
                .rows
                .iter()
                .enumerate()
                .map(|(i, r)| r.iter().map(|(j, t)| (*j, small_matmul(&b.blocks()[i], t))).collect())
                .collect(),
        }
    }

    /// `A B` for block-diagonal `B` with matching tiles.
    pub fn right_diag(&self, b: &BlockDiagonal) -> Self {
        self.check_diag(b);
        self.map_indexed(|_, j, t| small_matmul(t, &b.blocks()[j]))
    }

    /// `B A B`.
    pub fn sandwich(&self, b: &BlockDiagonal) -> Self {
        self.left_diag(b).right_diag(b)
    }

    fn map_indexed(&self, f: impl Fn(usize, usize, &CMatrix) -> CMatrix) -> Self {
        Self {
            block: self.block,
            rows: self
                .rows
                .iter()
                .enumerate()
                .map(|(i, r)| r.iter().map(|(j, t)| (*j, f(i, *j, t))).collect())
                .collect(),
        }
    }

    fn check_diag(&self, b: &BlockDiagonal) {
        assert_eq!(b.block_size(), self.block, "tile size mismatch");
        assert_eq!(b.blocks().len(), self.nblocks(), "block count mismatch");
    }

    pub fn fro_norm(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .map(|(_, t)| t.data().iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.rows.iter().flatten().map(|(_, t)| t.max_abs()).fold(0.0, f64::max)
    }

    /// `‖A - A*‖_F`.
    pub fn hermiticity_residual(&self) -> f64 {
        (self - &self.adjoint()).fro_norm()
    }

    /// Upper bound on the operator norm, `sqrt(‖A‖₁ ‖A‖_∞)`.
    pub fn op_norm_upper_bound(&self) -> f64 {
        let d = self.block;
        let mut row_sums = vec![0.0_f64; self.dim()];
        let mut col_sums = vec![0.0_f64; self.dim()];
        for (bi, bj, t) in self.iter() {
            for i in 0..d {
                for j in 0..d {
                    let a = t[(i, j)].norm();
                    row_sums[bi * d + i] += a;
                    col_sums[bj * d + j] += a;
                }
            }
        }
        let r = row_sums.into_iter().fold(0.0, f64::max);
        let c = col_sums.into_iter().fold(0.0, f64::max);
        (r * c).sqrt()
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim());
        let d = self.block;
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (bi, bj, t) in self.iter() {
            for i in 0..d {
                for j in 0..d {
                    out[bi * d + i] += t[(i, j)] * v[bj * d + j];
                }
            }
        }
        out
    }
}

/// Tiles are tiny, so a direct triple loop beats a GEMM dispatch.
fn small_matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (n, k, m) = (a.rows(), a.cols(), b.cols());
    CMatrix::from_fn(n, m, |i, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for s in 0..k {
            acc += a[(i, s)] * b[(s, j)];
        }
        acc
    })
}

impl Add for &BlockSparse {
    type Output = BlockSparse;
    fn add(self, rhs: Self) -> BlockSparse {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &BlockSparse {
    type Output = BlockSparse;
    fn sub(self, rhs: Self) -> BlockSparse {
        self.zip_with(rhs, |a, b| a - b)
    }
}
