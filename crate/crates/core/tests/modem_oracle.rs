use fameeq_core::modem::{Constellation, LLR_CLAMP};
use fameeq_core::Complex64;
use proptest::prelude::*;

/// Direct evaluation of the per-bit log-likelihood ratio: plain sums of
/// exponentials over the two label subsets, no shifting.
fn naive_llrs(c: &Constellation, s_hat: Complex64, nu_sq: f64) -> Vec<f64> {
    let q = c.bits_per_symbol();
    (0..q)
        .map(|bit| {
            let (mut one, mut zero) = (0.0f64, 0.0f64);
            for (label, p) in c.points().iter().enumerate() {
                let t = (-(s_hat - p).norm_sqr() / nu_sq).exp();
                if (label >> (q - 1 - bit)) & 1 == 1 {
                    one += t;
                } else {
                    zero += t;
                }
            }
            one.ln() - zero.ln()
        })
        .collect()
}

#[test]
fn matches_naive_sum_at_reference_point() {
    let c = Constellation::qam16(1.0).unwrap();
    let s = Complex64::new(0.1, 0.2);
    let got = c.soft_demap(s, 0.5).unwrap();
    let want = naive_llrs(&c, s, 0.5);
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() <= 1e-9 * w.abs().max(1.0), "{g} vs {w}");
    }
}

#[test]
fn llrs_vanish_for_huge_variance() {
    let c = Constellation::qam16(1.0).unwrap();
    let l = c.soft_demap(Complex64::new(0.7, -1.1), 1e12).unwrap();
    assert!(l.iter().all(|v| v.abs() < 1e-9));
}

#[test]
fn clamped_at_tiny_variance() {
    let c = Constellation::qam16(1.0).unwrap();
    let l = c.soft_demap(Complex64::new(5.0, -5.0), 1e-9).unwrap();
    assert!(l.iter().all(|v| v.abs() == LLR_CLAMP));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn agrees_with_naive_oracle(
        re in -1.5f64..1.5,
        im in -1.5f64..1.5,
        log_nu in -3.0f64..3.0,
        qpsk in any::<bool>(),
    ) {
        let c = if qpsk { Constellation::qpsk(1.0).unwrap() } else { Constellation::qam16(1.0).unwrap() };
        let nu_sq = 10f64.powf(log_nu);
        let s = Complex64::new(re, im);
        let want = naive_llrs(&c, s, nu_sq);
        // The naive sums underflow for very small nu_sq; only compare where
        // they are meaningful and below the clamp.
        prop_assume!(want.iter().all(|w| w.is_finite() && w.abs() < LLR_CLAMP));
        let got = c.soft_demap(s, nu_sq).unwrap();
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() <= 1e-9 * w.abs().max(1.0), "{} vs {}", g, w);
        }
    }

    #[test]
    fn negation_flips_sign_bits(re in -2.0f64..2.0, im in -2.0f64..2.0, log_nu in -2.0f64..2.0) {
        let c = Constellation::qam16(1.0).unwrap();
        let nu_sq = 10f64.powf(log_nu);
        let s = Complex64::new(re, im);
        let a = c.soft_demap(s, nu_sq).unwrap();
        let b = c.soft_demap(-s, nu_sq).unwrap();
        prop_assert!((a[0] + b[0]).abs() <= 1e-12 * a[0].abs().max(1.0));
        prop_assert!((a[2] + b[2]).abs() <= 1e-12 * a[2].abs().max(1.0));
        // inner bits are symmetric under negation
        prop_assert!((a[1] - b[1]).abs() <= 1e-12 * a[1].abs().max(1.0));
        prop_assert!((a[3] - b[3]).abs() <= 1e-12 * a[3].abs().max(1.0));
    }
}
