//! Seeded generators for test matrices and vectors.
//!
//! All randomness in the crate flows through [`rng`], a ChaCha8 stream keyed
//! by a `u64` seed, so every report can name the seed that reproduces it.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linops::{herm_eig, vec_norm, CMatrix};

pub type LabRng = ChaCha8Rng;

pub fn rng(seed: u64) -> LabRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_normal(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// GUE-type hermitian matrix scaled so its spectrum sits in roughly `[-2, 2]`.
pub fn hermitian(dim: usize, rng: &mut impl Rng) -> CMatrix {
    let a = gaussian_matrix(dim, dim, rng);
    a.hermitian_part().scale_real((2.0 / dim as f64).sqrt())
}

/// Unitary matrix from the eigenvectors of a random hermitian matrix.
pub fn unitary(dim: usize, rng: &mut impl Rng) -> CMatrix {
    herm_eig(&hermitian(dim, rng))
        .expect("hermitian by construction")
        .vectors
}

pub fn unit_vector(dim: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim).map(|_| complex_normal(rng)).collect();
    let norm = vec_norm(&v);
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

/// Real orthogonal `n x n` matrix (row-major) by Gram-Schmidt on Gaussian columns.
pub fn orthogonal(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        for _ in 0..2 {
            for c in &cols {
                let dot: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(c).for_each(|(a, b)| *a -= dot * b);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            cols.push(v);
        }
    }
    let mut out = vec![0.0; n * n];
    for (j, c) in cols.iter().enumerate() {
        for i in 0..n {
            out[i * n + j] = c[i];
        }
    }
    out
}
