//! Convergence diagnostics for the approximate-identity machinery.
//!
//! Every table is measured along a geometric grid `λ_k = ±i λ₀ 2^k` and,
//! for strong convergence, reports the maximum over a fixed set of test
//! vectors. `fitted_rate` is the least-squares slope of `log value` against
//! `log |λ|` over the last half of the grid.

use num_complex::Complex64;
use serde::Serialize;

use super::{approx_identity, bracket, BracketKind, OperatorPair, WeakpairError};
use crate::linops::{gen_eig_max, herm_eig, op_norm, resolvent, vec_norm, CMatrix, LinopsError};
use crate::random;

/// Number of Gaussian test vectors; the extreme eigenvectors of `G` are added.
pub const GAUSSIAN_TEST_VECTORS: usize = 8;
/// Lowest and highest eigenvectors of `G` added to the test set (each end).
pub const EXTREME_TEST_VECTORS: usize = 2;
/// Doublings of `λ₀` tried before giving up.
pub const MAX_LAMBDA0_DOUBLINGS: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    #[serde(rename = "+i")]
    PlusI,
    #[serde(rename = "-i")]
    MinusI,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::PlusI, Direction::MinusI];

    pub fn unit(self) -> Complex64 {
        match self {
            Direction::PlusI => Complex64::new(0.0, 1.0),
            Direction::MinusI => Complex64::new(0.0, -1.0),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Direction::PlusI => "+i",
            Direction::MinusI => "-i",
        }
    }
}

/// `λ_k = dir · λ₀ · 2^k`, `k = 0..count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub lambda0: f64,
    pub count: usize,
    pub direction: Direction,
}

impl Grid {
    pub fn new(lambda0: f64, count: usize, direction: Direction) -> Self {
        assert!(lambda0 > 0.0 && lambda0.is_finite(), "lambda0 must be positive");
        assert!(count >= 2, "grid needs at least two points");
        Self {
            lambda0,
            count,
            direction,
        }
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.lambda0 * 2f64.powi(k as i32)).collect()
    }

    pub fn points(&self) -> Vec<(f64, Complex64)> {
        self.magnitudes()
            .into_iter()
            .map(|m| (m, self.direction.unit() * m))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableMeta {
    pub dim: usize,
    pub lambda0: f64,
    pub direction: Direction,
    pub vectors: usize,
    pub mu: Option<Complex64>,
}

/// `(parameter, value)` rows with strictly increasing parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticsTable {
    pub name: String,
    pub rows: Vec<(f64, f64)>,
    pub fitted_rate: Option<f64>,
    pub meta: TableMeta,
}

impl DiagnosticsTable {
    pub fn new(name: impl Into<String>, rows: Vec<(f64, f64)>, meta: TableMeta) -> Self {
        assert!(rows.windows(2).all(|w| w[0].0 < w[1].0), "parameters must increase");
        assert!(
            rows.iter().all(|r| r.1.is_finite() && r.1 >= 0.0),
            "values must be finite and nonnegative"
        );
        let fitted_rate = fitted_rate(&rows);
        Self {
            name: name.into(),
            rows,
            fitted_rate,
            meta,
        }
    }

    /// `name` plus the grid direction, e.g. `lemma_a1_s_+i`.
    pub fn key(&self) -> String {
        format!("{}_{}", self.name, self.meta.direction.label())
    }

    pub fn first(&self) -> f64 {
        self.rows[0].1
    }

    pub fn last(&self) -> f64 {
        self.rows[self.rows.len() - 1].1
    }

    pub fn max(&self) -> f64 {
        self.rows.iter().map(|r| r.1).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.1 == 0.0)
    }

    /// `param,value` CSV with header and LF endings.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("param,value\n");
        for (p, v) in &self.rows {
            s.push_str(&format!("{p},{v}\n"));
        }
        s
    }
}

/// Least-squares slope of `log v` against `log p` over the last half of the
/// rows; `None` when fewer than two rows remain or a value there is zero.
pub fn fitted_rate(rows: &[(f64, f64)]) -> Option<f64> {
    let tail = &rows[rows.len() / 2..];
    if tail.len() < 2 || tail.iter().any(|r| !(r.1 > 0.0 && r.0 > 0.0)) {
        return None;
    }
    let xs: Vec<f64> = tail.iter().map(|r| r.0.ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|r| r.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Some(sxy / sxx)
}

fn res(m: &CMatrix, z: Complex64) -> Result<CMatrix, WeakpairError> {
    resolvent(m, z).map_err(|source| WeakpairError::SingularAt { lambda: z, source })
}

fn max_over(vectors: &[Vec<Complex64>], f: impl Fn(&[Complex64]) -> f64) -> f64 {
    vectors.iter().map(|v| f(v)).fold(0.0, f64::max)
}

fn diff_norm(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn meta(pair: &OperatorPair, grid: &Grid, vectors: usize, mu: Option<Complex64>) -> TableMeta {
    TableMeta {
        dim: pair.dim(),
        lambda0: grid.lambda0,
        direction: grid.direction,
        vectors,
        mu,
    }
}

/// Gaussian unit vectors drawn from `seed`, then the lowest and highest
/// eigenvectors of `G`.
pub fn test_vectors(pair: &OperatorPair, seed: u64) -> Result<Vec<Vec<Complex64>>, WeakpairError> {
    let mut rng = random::rng(seed);
    let dim = pair.dim();
    let mut out: Vec<Vec<Complex64>> = (0..GAUSSIAN_TEST_VECTORS)
        .map(|_| random::unit_vector(dim, &mut rng))
        .collect();
    let eig = herm_eig(pair.gram())?;
    let mut picks: Vec<usize> = (0..EXTREME_TEST_VECTORS.min(dim)).collect();
    for k in dim.saturating_sub(EXTREME_TEST_VECTORS)..dim {
        if !picks.contains(&k) {
            picks.push(k);
        }
    }
    out.extend(picks.into_iter().map(|k| eig.vector(k)));
    Ok(out)
}

/// `λ₀ = 2(1 + √C)`, doubled until every resolvent on both grids is
/// invertible, including those at `μ = 2iλ₀`.
pub fn select_lambda0(pair: &OperatorPair, c: f64, count: usize) -> Result<f64, WeakpairError> {
    let mut lambda0 = 2.0 * (1.0 + c.max(0.0).sqrt());
    for _ in 0..MAX_LAMBDA0_DOUBLINGS {
        let ok = Direction::BOTH.iter().all(|&dir| {
            let mut pts: Vec<Complex64> = Grid::new(lambda0, count, dir)
                .points()
                .into_iter()
                .map(|p| p.1)
                .collect();
            pts.push(dir.unit() * 2.0 * lambda0);
            pts.iter()
                .all(|&z| resolvent(pair.s(), z).is_ok() && resolvent(pair.t(), z).is_ok())
        });
        if ok {
            return Ok(lambda0);
        }
        lambda0 *= 2.0;
    }
    Err(WeakpairError::NoLambda0 {
        doublings: MAX_LAMBDA0_DOUBLINGS,
    })
}

/// `‖λ(S+λ)^{-1}ξ - ξ‖`, `‖λ(T+λ)^{-1}ξ - ξ‖`, `‖λ²(S+λ)^{-1}(T+λ)^{-1}ξ - ξ‖`.
pub fn lemma_a1_tables(
    pair: &OperatorPair,
    vectors: &[Vec<Complex64>],
    grid: &Grid,
) -> Result<[DiagnosticsTable; 3], WeakpairError> {
    let mut rows = [Vec::new(), Vec::new(), Vec::new()];
    for (mag, z) in grid.points() {
        let rs = res(pair.s(), z)?;
        let rt = res(pair.t(), z)?;
        let vs = max_over(vectors, |v| {
            let w: Vec<_> = rs.matvec(v).into_iter().map(|x| x * z).collect();
            diff_norm(&w, v)
        });
        let vt = max_over(vectors, |v| {
            let w: Vec<_> = rt.matvec(v).into_iter().map(|x| x * z).collect();
            diff_norm(&w, v)
        });
        let vst = max_over(vectors, |v| {
            let w: Vec<_> = rs.matvec(&rt.matvec(v)).into_iter().map(|x| x * z * z).collect();
            diff_norm(&w, v)
        });
        rows[0].push((mag, vs));
        rows[1].push((mag, vt));
        rows[2].push((mag, vst));
    }
    let m = meta(pair, grid, vectors.len(), None);
    let [r0, r1, r2] = rows;
    Ok([
        DiagnosticsTable::new("lemma_a1_s", r0, m.clone()),
        DiagnosticsTable::new("lemma_a1_t", r1, m.clone()),
        DiagnosticsTable::new("lemma_a1_st", r2, m),
    ])
}

fn require_commutator(pair: &OperatorPair) -> Result<(), WeakpairError> {
    pair.require(BracketKind::Commutator)
}

/// `‖[S,T](S+λ)^{-1}(T+μ)^{-1}ξ‖` and `‖[S,T](T+λ)^{-1}(S+μ)^{-1}ξ‖`.
pub fn lemma_a2_tables(
    pair: &OperatorPair,
    mu: Complex64,
    vectors: &[Vec<Complex64>],
    grid: &Grid,
) -> Result<[DiagnosticsTable; 2], WeakpairError> {
    require_commutator(pair)?;
    let x = bracket(pair);
    let rs_mu = res(pair.s(), mu)?;
    let rt_mu = res(pair.t(), mu)?;
    let pre_t: Vec<_> = vectors.iter().map(|v| rt_mu.matvec(v)).collect();
    let pre_s: Vec<_> = vectors.iter().map(|v| rs_mu.matvec(v)).collect();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (mag, z) in grid.points() {
        let rs = res(pair.s(), z)?;
        let rt = res(pair.t(), z)?;
        a.push((mag, max_over(&pre_t, |v| vec_norm(&x.matvec(&rs.matvec(v))))));
        b.push((mag, max_over(&pre_s, |v| vec_norm(&x.matvec(&rt.matvec(v))))));
    }
    let m = meta(pair, grid, vectors.len(), Some(mu));
    Ok([
        DiagnosticsTable::new("lemma_a2_s", a, m.clone()),
        DiagnosticsTable::new("lemma_a2_t", b, m),
    ])
}

/// `λ²[S, (S+λ)^{-1}(T+λ)^{-1}]` and `λ²[T, (S+λ)^{-1}(T+λ)^{-1}]` at one `λ`.
fn inner_commutators(pair: &OperatorPair, z: Complex64) -> Result<(CMatrix, CMatrix), WeakpairError> {
    let prod = res(pair.s(), z)?.matmul(&res(pair.t(), z)?);
    let z2 = z * z;
    Ok((
        pair.s().commutator(&prod).scale(z2),
        pair.t().commutator(&prod).scale(z2),
    ))
}

/// Operator norms of the two families of [`inner_commutators`] over the grid.
#[derive(Clone, Debug, Serialize)]
pub struct LemmaA3Bound {
    pub s_norms: DiagnosticsTable,
    pub t_norms: DiagnosticsTable,
    pub sup_s: f64,
    pub sup_t: f64,
    /// Max/min over the upper half of the grid (1 for an all-zero family).
    pub upper_half_ratio_s: f64,
    pub upper_half_ratio_t: f64,
}

fn upper_half_ratio(t: &DiagnosticsTable) -> f64 {
    let tail = &t.rows[t.rows.len() / 2..];
    let max = tail.iter().map(|r| r.1).fold(0.0, f64::max);
    let min = tail.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        1.0
    } else {
        max / min
    }
}

pub fn lemma_a3_bound(pair: &OperatorPair, grid: &Grid) -> Result<LemmaA3Bound, WeakpairError> {
    let mut s_rows = Vec::new();
    let mut t_rows = Vec::new();
    for (mag, z) in grid.points() {
        let (cs, ct) = inner_commutators(pair, z)?;
        s_rows.push((mag, op_norm(&cs)));
        t_rows.push((mag, op_norm(&ct)));
    }
    let m = meta(pair, grid, 0, None);
    let s_norms = DiagnosticsTable::new("lemma_a3_s", s_rows, m.clone());
    let t_norms = DiagnosticsTable::new("lemma_a3_t", t_rows, m);
    Ok(LemmaA3Bound {
        sup_s: s_norms.max(),
        sup_t: t_norms.max(),
        upper_half_ratio_s: upper_half_ratio(&s_norms),
        upper_half_ratio_t: upper_half_ratio(&t_norms),
        s_norms,
        t_norms,
    })
}

/// `‖λ²[S, (S+λ)^{-1}(T+λ)^{-1}]ξ‖` and the `T` version.
pub fn prop23_tables(
    pair: &OperatorPair,
    vectors: &[Vec<Complex64>],
    grid: &Grid,
) -> Result<[DiagnosticsTable; 2], WeakpairError> {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (mag, z) in grid.points() {
        let (cs, ct) = inner_commutators(pair, z)?;
        a.push((mag, max_over(vectors, |v| vec_norm(&cs.matvec(v)))));
        b.push((mag, max_over(vectors, |v| vec_norm(&ct.matvec(v)))));
    }
    let m = meta(pair, grid, vectors.len(), None);
    Ok([
        DiagnosticsTable::new("prop23_s", a, m.clone()),
        DiagnosticsTable::new("prop23_t", b, m),
    ])
}

/// Smallest `c` with `‖[S,T]ψ‖ ≤ c (1/|λ| + 1/|μ|) ‖(T+μ)(S+λ)ψ‖`.
pub fn lm_lemma32_constant(pair: &OperatorPair, lambda: Complex64, mu: Complex64) -> Result<f64, WeakpairError> {
    require_commutator(pair)?;
    let x = bracket(pair);
    let xx = x.adjoint().matmul(&x).hermitian_part();
    let m = pair.t().shift_diag(mu).matmul(&pair.s().shift_diag(lambda));
    let w = (1.0 / lambda.norm() + 1.0 / mu.norm()).powi(2);
    let g = m.adjoint().matmul(&m).hermitian_part().scale_real(w);
    match gen_eig_max(&xx, &g) {
        Ok(v) => Ok(v.max(0.0).sqrt()),
        Err(LinopsError::NotPositiveDefinite { pivot }) => Err(WeakpairError::SingularAt {
            lambda,
            source: LinopsError::Singular {
                sigma_min_estimate: pivot.max(0.0).sqrt(),
            },
        }),
        Err(e) => Err(e.into()),
    }
}

/// [`lm_lemma32_constant`] with `λ = μ` running along the grid.
pub fn lm_lemma32_table(pair: &OperatorPair, grid: &Grid) -> Result<DiagnosticsTable, WeakpairError> {
    let rows = grid
        .points()
        .into_iter()
        .map(|(mag, z)| Ok((mag, lm_lemma32_constant(pair, z, z)?)))
        .collect::<Result<Vec<_>, WeakpairError>>()?;
    Ok(DiagnosticsTable::new("lm_lemma32", rows, meta(pair, grid, 0, None)))
}

/// `‖(S+T+μ)^{-1} - (S+T+λ^{-1}ST+μ)^{-1}‖`.
pub fn resolvent_approx_error(pair: &OperatorPair, mu: Complex64, lambda: Complex64) -> Result<f64, WeakpairError> {
    pair.require(BracketKind::Anticommutator)?;
    let sum = pair.s() + pair.t();
    let r1 = res(&sum, mu)?;
    let st = pair.s().matmul(pair.t()).scale(lambda.inv());
    let r2 = res(&(&sum + &st), mu).map_err(|e| match e {
        WeakpairError::SingularAt { source, .. } => WeakpairError::SingularAt { lambda, source },
        other => other,
    })?;
    Ok(op_norm(&(&r1 - &r2)))
}

pub fn resolvent_approx_table(
    pair: &OperatorPair,
    mu: Complex64,
    grid: &Grid,
) -> Result<DiagnosticsTable, WeakpairError> {
    let rows = grid
        .points()
        .into_iter()
        .map(|(mag, z)| Ok((mag, resolvent_approx_error(pair, mu, z)?)))
        .collect::<Result<Vec<_>, WeakpairError>>()?;
    Ok(DiagnosticsTable::new(
        "resolvent_approx",
        rows,
        meta(pair, grid, 0, Some(mu)),
    ))
}

/// `‖[S+T, A_n]ξ‖`.
pub fn sum_approx_residual(pair: &OperatorPair, xi: &[Complex64], n: f64) -> Result<f64, WeakpairError> {
    require_commutator(pair)?;
    let a = approx_identity(pair, n)?;
    let sum = pair.s() + pair.t();
    let lhs = sum.matvec(&a.matvec(xi));
    let rhs = a.matvec(&sum.matvec(xi));
    Ok(diff_norm(&lhs, &rhs))
}

/// [`sum_approx_residual`] along `n = |λ_k|`, maximised over the vectors.
pub fn sum_approx_table(
    pair: &OperatorPair,
    vectors: &[Vec<Complex64>],
    grid: &Grid,
) -> Result<DiagnosticsTable, WeakpairError> {
    require_commutator(pair)?;
    let sum = pair.s() + pair.t();
    let mut rows = Vec::new();
    for n in grid.magnitudes() {
        let a = approx_identity(pair, n)?;
        let comm = sum.commutator(&a);
        rows.push((n, max_over(vectors, |v| vec_norm(&comm.matvec(v)))));
    }
    Ok(DiagnosticsTable::new(
        "sum_approx",
        rows,
        meta(pair, grid, vectors.len(), None),
    ))
}

/// `‖A_nξ - ξ‖` along `n = |λ_k|`, plus `max_n ‖A_n‖`.
pub fn approx_identity_table(
    pair: &OperatorPair,
    vectors: &[Vec<Complex64>],
    grid: &Grid,
) -> Result<(DiagnosticsTable, f64), WeakpairError> {
    let mut rows = Vec::new();
    let mut max_norm = 0.0_f64;
    for n in grid.magnitudes() {
        let a = approx_identity(pair, n)?;
        max_norm = max_norm.max(op_norm(&a));
        rows.push((n, max_over(vectors, |v| diff_norm(&a.matvec(v), v))));
    }
    Ok((
        DiagnosticsTable::new("approx_identity", rows, meta(pair, grid, vectors.len(), None)),
        max_norm,
    ))
}
