//! Splitting a first-order lattice operator `A = A₁ + A₂` so that the
//! derivative content of `A₁` points along `E₁` and that of `A₂` along `E₂`.
//!
//! Write `A = Σ_δ C_δ(x) S_δ` with `(S_δψ)(x) = ψ(x + δ)`. Each pair of
//! opposite offsets splits into an even part `½(C_δ + C_{-δ})(S_δ + S_{-δ})`,
//! which is bounded and goes to `A₁` with the diagonal, and an odd part
//! `O = ½(C_δ - C_{-δ})` multiplying `S_δ - S_{-δ}`. The odd difference
//! telescopes into central differences,
//!
//! ```text
//! S_δ - S_{-δ} = Σ_a sign(δ_a) 2h D_a W_{δ,a},
//! W_{δ,a} = Π_{b<a} S_b^{-δ_b} · (S_a + S_a^{-1} if |δ_a| = 2) · Π_{b>a} S_b^{δ_b},
//! ```
//!
//! and each `D_a` is resolved into frame components `Σ_b P₁(x)_{ab} D_b +
//! Σ_b P₂(x)_{ab} D_b` with the site-wise projectors onto `E₁`, `E₂`.
//!
//! Products of two nearest-neighbour stencils reach offsets with `|δ|₁ ≤ 2`,
//! so that is the stencil accepted here.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{LatticeError, TorusModel, STENCIL_TOL};
use crate::linops::{op_norm, resolvent, BlockSparse, CMatrix, LinopsError};

/// Scalar translation-invariant stencil: offset -> coefficient.
type Stencil = BTreeMap<Vec<isize>, f64>;

#[derive(Clone, Debug)]
pub struct FirstOrderSplit {
    pub a1: BlockSparse,
    pub a2: BlockSparse,
    /// `‖off-stencil part‖_F / ‖A‖_F`.
    pub off_stencil_ratio: f64,
    /// `‖A₁ + A₂ - A‖_F`.
    pub reconstruction_residual: f64,
}

fn single(offset: Vec<isize>, coef: f64) -> Stencil {
    Stencil::from([(offset, coef)])
}

fn compose(a: &Stencil, b: &Stencil) -> Stencil {
    let mut out = Stencil::new();
    for (da, ca) in a {
        for (db, cb) in b {
            let d: Vec<isize> = da.iter().zip(db).map(|(x, y)| x + y).collect();
            *out.entry(d).or_insert(0.0) += ca * cb;
        }
    }
    out
}

fn shift(n: usize, axis: usize, k: isize) -> Stencil {
    let mut d = vec![0; n];
    d[axis] = k;
    single(d, 1.0)
}

fn central_difference(n: usize, axis: usize, h: f64) -> Stencil {
    let w = 0.5 / h;
    let mut s = Stencil::new();
    for (k, c) in [(1, w), (-1, -w)] {
        let mut d = vec![0; n];
        d[axis] = k;
        s.insert(d, c);
    }
    s
}

/// `W_{δ,a}` as above.
fn telescoping_factor(delta: &[isize], a: usize) -> Stencil {
    let n = delta.len();
    let mut w = single(vec![0; n], 1.0);
    for (b, &db) in delta.iter().enumerate() {
        if b < a && db != 0 {
            w = compose(&w, &shift(n, b, -db));
        } else if b > a && db != 0 {
            w = compose(&w, &shift(n, b, db));
        }
    }
    if delta[a].abs() == 2 {
        let mut sym = shift(n, a, 1);
        sym.extend(shift(n, a, -1));
        w = compose(&w, &sym);
    }
    w
}

fn negate(d: &[isize], points: usize) -> Vec<isize> {
    let half = points as isize / 2;
    d.iter().map(|&x| if x == half { half } else { -x }).collect()
}

/// Splits `A` along the frame of `model`; see the module notes.
pub fn split_first_order(a: &BlockSparse, model: &TorusModel) -> Result<FirstOrderSplit, LatticeError> {
    let lat = &model.lattice;
    let n = lat.n();
    let d = model.rep.dim();
    if a.dim() != model.dim() || a.block_size() != d {
        return Err(LatticeError::DimensionMismatch {
            expected: model.dim(),
            found: a.dim(),
        });
    }

    // Group tiles by offset; anything outside |δ|₁ ≤ 2 is off-stencil.
    let mut off_mass = 0.0;
    let mut coeffs: BTreeMap<Vec<isize>, Vec<Option<CMatrix>>> = BTreeMap::new();
    for (x, y, tile) in a.iter() {
        let delta = lat.wrapped_offset(x, y);
        let l1: isize = delta.iter().map(|v| v.abs()).sum();
        if l1 > 2 {
            off_mass += tile.fro_norm().powi(2);
            continue;
        }
        let slot = coeffs.entry(delta).or_insert_with(|| vec![None; lat.sites()]);
        slot[x] = Some(tile.clone());
    }
    let total = a.fro_norm();
    let ratio = if total > 0.0 { off_mass.sqrt() / total } else { 0.0 };
    if ratio > STENCIL_TOL {
        return Err(LatticeError::NotFirstOrder { ratio });
    }

    let zero = CMatrix::zeros(d, d);
    let tile = |delta: &Vec<isize>, x: usize| -> CMatrix {
        coeffs
            .get(delta)
            .and_then(|v| v[x].clone())
            .unwrap_or_else(|| zero.clone())
    };

    // Site-wise projectors onto E₁ and E₂, row-major n x n.
    let projectors: Vec<(Vec<f64>, Vec<f64>)> = (0..lat.sites())
        .map(|x| {
            let f = model.frame.frame_at(lat, x);
            let n1 = model.frame.split.n1;
            let mut p1 = vec![0.0; n * n];
            let mut p2 = vec![0.0; n * n];
            for a in 0..n {
                for b in 0..n {
                    for j in 0..n {
                        let v = f.get(a, j) * f.get(b, j);
                        if j < n1 {
                            p1[a * n + b] += v;
                        } else {
                            p2[a * n + b] += v;
                        }
                    }
                }
            }
            (p1, p2)
        })
        .collect();

    let diffs: Vec<Stencil> = (0..n).map(|b| central_difference(n, b, lat.h())).collect();
    let mut a1 = BlockSparse::zeros(lat.sites(), d);
    let mut a2 = BlockSparse::zeros(lat.sites(), d);

    let apply = |target: &mut BlockSparse, x: usize, k: &CMatrix, stencil: &Stencil| {
        for (off, &c) in stencil {
            if c != 0.0 {
                target.add_block(x, lat.offset(x, off), &k.scale_real(c));
            }
        }
    };

    let origin = vec![0isize; n];
    let mut seen = std::collections::BTreeSet::new();
    for delta in coeffs.keys() {
        if seen.contains(delta) {
            continue;
        }
        let minus = negate(delta, lat.points());
        seen.insert(delta.clone());
        seen.insert(minus.clone());
        if *delta == origin || minus == *delta {
            // diagonal, or an offset that is its own opposite on this grid
            for x in 0..lat.sites() {
                let c = tile(delta, x);
                a1.add_block(x, lat.offset(x, delta), &c);
            }
            continue;
        }

        // Per odd-difference term: (sign, a, D_b ∘ W for each b).
        let terms: Vec<(f64, usize, Vec<Stencil>)> = (0..n)
            .filter(|&ax| delta[ax] != 0)
            .map(|ax| {
                let w = telescoping_factor(delta, ax);
                let sign = delta[ax].signum() as f64;
                let per_b = diffs.iter().map(|db| compose(db, &w)).collect();
                (sign, ax, per_b)
            })
            .collect();

        let two_h = 2.0 * lat.h();
        for x in 0..lat.sites() {
            let cp = tile(delta, x);
            let cm = tile(&minus, x);
            let even = (&cp + &cm).scale_real(0.5);
            let odd = (&cp - &cm).scale_real(0.5);
            if even.max_abs() > 0.0 {
                a1.add_block(x, lat.offset(x, delta), &even);
                a1.add_block(x, lat.offset(x, &minus), &even);
            }
            if odd.max_abs() == 0.0 {
                continue;
            }
            let (p1, p2) = &projectors[x];
            for (sign, ax, per_b) in &terms {
                for (b, stencil) in per_b.iter().enumerate() {
                    let w1 = sign * two_h * p1[ax * n + b];
                    let w2 = sign * two_h * p2[ax * n + b];
                    if w1 != 0.0 {
                        apply(&mut a1, x, &odd.scale_real(w1), stencil);
                    }
                    if w2 != 0.0 {
                        apply(&mut a2, x, &odd.scale_real(w2), stencil);
                    }
                }
            }
        }
    }

    let reconstruction_residual = (&(&a1 + &a2) - a).fro_norm();
    Ok(FirstOrderSplit {
        a1,
        a2,
        off_stencil_ratio: ratio,
        reconstruction_residual,
    })
}

/// Dense entry point; tiles are read off the matrix first.
pub fn split_first_order_dense(a: &CMatrix, model: &TorusModel) -> Result<FirstOrderSplit, LatticeError> {
    let sparse = BlockSparse::from_dense(a, model.rep.dim())?;
    split_first_order(&sparse, model)
}

/// `max_± ‖A (D ± i)^{-1}‖`.
pub fn relative_bound_norm(a: &CMatrix, d: &CMatrix) -> Result<f64, LinopsError> {
    let mut best = 0.0_f64;
    for s in [1.0, -1.0] {
        let r = resolvent(d, Complex64::new(0.0, s))?;
        best = best.max(op_norm(&a.matmul(&r)));
    }
    Ok(best)
}
