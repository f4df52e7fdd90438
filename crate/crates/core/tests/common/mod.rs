#![allow(dead_code)]

use fameeq_core::numerics::CMatrix;
use fameeq_core::Complex64;
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn random_vec(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

pub fn to_na(m: &CMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(r, c)])
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// `||H^H x||^2`, `rho ||x||^2` and `h_u^H x` by explicit summation.
pub fn naive_parts(h: &CMatrix, rho: f64, u: usize, x: &[Complex64]) -> (f64, f64, Complex64) {
    let mut total = 0.0;
    let mut signal = Complex64::new(0.0, 0.0);
    for i in 0..h.cols() {
        let mut acc = Complex64::new(0.0, 0.0);
        for b in 0..h.rows() {
            acc += h[(b, i)].conj() * x[b];
        }
        total += acc.norm_sqr();
        if i == u {
            signal = acc;
        }
    }
    let xn: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    (total, rho * xn, signal)
}

pub fn naive_objective(h: &CMatrix, rho: f64, u: usize, x: &[Complex64]) -> f64 {
    let (t, r, s) = naive_parts(h, rho, u, x);
    (t + r) / s.norm_sqr()
}
