//! Reference routines for the property tests. Plain loops, no faer.
#![allow(dead_code)]

use krein_lab::linops::CMatrix;
use num_complex::Complex64;

/// Eigenvalues of a hermitian matrix, ascending, by cyclic Jacobi on the real
/// embedding `[[A, -B], [B, A]]` of `H = A + iB`. Every eigenvalue of `H`
/// shows up twice in the embedding; one copy of each pair is kept.
pub fn jacobi_eigvals(h: &CMatrix) -> Vec<f64> {
    let n = h.rows();
    let m = 2 * n;
    let mut a = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            a[i * m + j] = z.re;
            a[(i + n) * m + j + n] = z.re;
            a[i * m + j + n] = -z.im;
            a[(i + n) * m + j] = z.im;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * m + j] * a[i * m + j])
            .sum();
        let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().max(f64::MIN_POSITIVE);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = a[p * m + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * m + q] - a[p * m + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut d: Vec<f64> = (0..m).map(|i| a[i * m + i]).collect();
    d.sort_by(f64::total_cmp);
    d.into_iter().step_by(2).collect()
}

/// `M* M`, by explicit triple loop.
pub fn gram(m: &CMatrix) -> CMatrix {
    let (r, c) = (m.rows(), m.cols());
    CMatrix::from_fn(c, c, |i, j| (0..r).map(|k| m[(k, i)].conj() * m[(k, j)]).sum())
}

/// Largest singular value from the Jacobi spectrum of `M* M`.
pub fn sigma_max(m: &CMatrix) -> f64 {
    jacobi_eigvals(&gram(m)).last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Power iteration on `M* M` from a fixed start, `iters` steps.
pub fn power_sigma_max(m: &CMatrix, iters: usize) -> f64 {
    let n = m.cols();
    let mut v: Vec<Complex64> = (0..n).map(|k| Complex64::new(1.0 + k as f64 * 1e-3, 0.5)).collect();
    let mut est = 0.0;
    for _ in 0..iters {
        let w = m.adjoint().matvec(&m.matvec(&v));
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        est = (norm / vn).sqrt();
        v = w.into_iter().map(|z| z / norm).collect();
    }
    est
}

pub fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
