//! Mean slowest-link attempts against an exact rational evaluation and
//! against sampling.

use hyrep_core::mcsim::{simulate_chain, ChainModel};
use hyrep_core::rates::{attempts_avg, attempts_avg_binomial};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// `Σ_{i=1}^n C(n,i)(−1)^{i+1}/(1 − q^i)` in exact arithmetic, `P = num/den`.
fn exact_a_n(n: u64, num: i64, den: i64) -> f64 {
    let q = BigRational::new(BigInt::from(den - num), BigInt::from(den));
    let mut qi = BigRational::one();
    let mut binom = BigInt::one();
    let mut sum = BigRational::zero();
    for i in 1..=n {
        binom = binom * BigInt::from(n - i + 1) / BigInt::from(i);
        qi = &qi * &q;
        let term = BigRational::from_integer(binom.clone()) / (BigRational::one() - &qi);
        if i % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum.to_f64().unwrap()
}

const PROBS: [(i64, i64); 4] = [(1, 2), (1, 10), (13, 500), (1, 1000)];

#[test]
fn series_matches_exact_sum() {
    for (num, den) in PROBS {
        let p = num as f64 / den as f64;
        for n in 1..=25 {
            let exact = exact_a_n(n, num, den);
            let series = attempts_avg(n, p).unwrap();
            assert!((series - exact).abs() <= 1e-9 * exact, "n={n} P={p}: {series} vs {exact}");
        }
    }
}

#[test]
fn binomial_form_matches_exact_for_small_n() {
    for (num, den) in PROBS {
        let p = num as f64 / den as f64;
        for n in 1..=25 {
            let exact = exact_a_n(n, num, den);
            let b = attempts_avg_binomial(n, p).unwrap();
            assert!((b - exact).abs() <= 1e-6 * exact, "n={n} P={p}: {b} vs {exact}");
        }
    }
}

#[test]
fn series_is_stable_at_large_n() {
    for p in [0.5, 0.1, 0.026, 1e-3] {
        let mut prev = 0.0;
        for n in [1000, 2000, 2999, 3000] {
            let a = attempts_avg(n, p).unwrap();
            assert!(a.is_finite() && a > prev, "n={n} P={p}: {a}");
            prev = a;
        }
        let binom = attempts_avg_binomial(3000, p).unwrap();
        let close = binom.is_finite() && (binom - prev).abs() < 1e-6 * prev;
        // the alternating sum cancels catastrophically here
        assert!(!close, "binomial form unexpectedly stable at n = 3000, P = {p}");
    }
}

#[test]
fn sampled_means_within_three_standard_errors() {
    for n in [1, 2, 5, 10, 60] {
        for p in [0.5, 0.1, 0.026] {
            let s = simulate_chain(&ChainModel::attempts_only(n, p), 20_000, 11 + n).unwrap();
            let a = attempts_avg(n, p).unwrap();
            let z = (s.a_n_hat - a) / s.a_n_se;
            assert!(z.abs() < 3.0, "n={n} P={p}: {} ± {} vs {a}", s.a_n_hat, s.a_n_se);
        }
    }
}

#[test]
fn sampled_fidelity_is_the_closed_form_value() {
    let c = hyrep_core::rates::presets::fig6a(18.0);
    let (model, report) = ChainModel::from_config(&c).unwrap();
    let s = simulate_chain(&model, 200, 3).unwrap();
    assert_eq!(s.f_hat, report.f_final);
    assert!(s.f_hat > 1.0 - c.epsilon);
}
