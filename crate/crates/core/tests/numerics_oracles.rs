mod common;

use common::*;
use fameeq_core::numerics::{gram, hpd_solve, spectral_norm_sq_estimate, CMatrix};
use fameeq_core::Complex64;

#[test]
fn gram_matches_double_loop() {
    let mut r = rng(1);
    let h = random_matrix(&mut r, 4, 2);
    let g = gram(&h);
    for i in 0..2 {
        for j in 0..2 {
            let mut s = Complex64::new(0.0, 0.0);
            for b in 0..4 {
                s += h[(b, i)].conj() * h[(b, j)];
            }
            assert!((g[(i, j)] - s).norm() < 1e-14);
        }
    }
}

#[test]
fn gram_is_exactly_hermitian() {
    let mut r = rng(2);
    for _ in 0..20 {
        let h = random_matrix(&mut r, 37, 9);
        let g = gram(&h);
        for i in 0..9 {
            assert_eq!(g[(i, i)].im, 0.0);
            for j in 0..9 {
                assert_eq!(g[(i, j)], g[(j, i)].conj());
            }
        }
    }
}

#[test]
fn solve_residual_on_well_conditioned_systems() {
    let mut r = rng(3);
    for _ in 0..50 {
        let g = random_matrix(&mut r, 12, 6);
        let mut a = gram(&g);
        for i in 0..6 {
            a[(i, i)].re += 1.0;
        }
        let b = random_matrix(&mut r, 6, 4);
        let x = hpd_solve(&a, &b).unwrap();
        let res = a.mul(&x).unwrap().frobenius_distance(&b) / b.frobenius_norm();
        assert!(res <= 1e-10, "residual {res}");
    }
}

#[test]
fn inverse_times_matrix_is_identity_up_to_cond_1e6() {
    let mut r = rng(4);
    let n = 8;
    // A = Q diag(1 .. 1e6) Q^H with Q unitary from a QR factorization.
    let q = to_na(&random_matrix(&mut r, n, n)).qr().q();
    let diag: Vec<f64> = (0..n).map(|i| 10f64.powf(6.0 * i as f64 / (n - 1) as f64)).collect();
    let d = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(diag[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let a_na = &q * d * q.adjoint();
    let a = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(a_na[(i, j)].re, 0.0)
        } else if i < j {
            a_na[(i, j)]
        } else {
            a_na[(j, i)].conj()
        }
    });
    let inv = hpd_solve(&a, &CMatrix::identity(n)).unwrap();
    let prod = inv.mul(&a).unwrap();
    let err = prod.frobenius_distance(&CMatrix::identity(n)) / (n as f64).sqrt();
    assert!(err <= 1e-9, "relative error {err}");
}

#[test]
fn spectral_norm_against_dense_eigensolver() {
    let mut r = rng(5);
    for _ in 0..20 {
        let h = random_matrix(&mut r, 8, 4);
        let g = to_na(&h).adjoint() * to_na(&h);
        let exact = g
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::MIN, f64::max);
        let est = spectral_norm_sq_estimate(&h, 30);
        assert!(rel_err(est, exact) <= 0.05, "{est} vs {exact}");
        assert!(est <= exact * (1.0 + 1e-12));
    }
}

#[test]
fn operations_are_deterministic() {
    let mut r = rng(6);
    let h = random_matrix(&mut r, 16, 5);
    assert_eq!(gram(&h), gram(&h));
    assert_eq!(
        spectral_norm_sq_estimate(&h, 30).to_bits(),
        spectral_norm_sq_estimate(&h, 30).to_bits()
    );
    let mut a = gram(&h);
    a[(0, 0)].re += 0.5;
    let b = random_matrix(&mut r, 5, 2);
    assert_eq!(hpd_solve(&a, &b).unwrap(), hpd_solve(&a, &b).unwrap());
}
