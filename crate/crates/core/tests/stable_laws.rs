use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use tvstable::analysis::{ks_critical_1pct, ks_two_sample};
use tvstable::rng::rng_from_seed;
use tvstable::stable::{
    char_fn, ecf_estimate, empirical_cdf, empirical_char_fn, sample, sample_n, sample_standard, StableParams,
    StandardStable,
};

// Characteristic function written out independently of the crate, S1 form.
fn oracle_char_fn(alpha: f64, beta: f64, sigma: f64, mu: f64, t: f64) -> Complex64 {
    if t == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let a = (sigma * t.abs()).powf(alpha);
    let skew = if (alpha - 1.0).abs() < 1e-12 {
        -beta * 2.0 / PI * t.signum() * t.abs().ln()
    } else {
        beta * t.signum() * (PI * alpha / 2.0).tan()
    };
    Complex64::new(-a, mu * t + a * skew).exp()
}

fn variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0)
}

#[test]
fn char_fn_special_cases() {
    let g = StableParams::new(2.0, 0.0, FRAC_1_SQRT_2, 0.0).unwrap();
    assert!((char_fn(&g, 1.0) - Complex64::new((-0.5f64).exp(), 0.0)).norm() < 1e-14);
    let c = StableParams::new(1.0, 0.0, 1.0, 0.0).unwrap();
    for t in [-3.0, -0.5, 0.7, 2.0] {
        assert!((char_fn(&c, t) - Complex64::new((-f64::abs(t)).exp(), 0.0)).norm() < 1e-14);
    }
    assert_eq!(char_fn(&c, 0.0), Complex64::new(1.0, 0.0));
}

#[test]
fn char_fn_matches_independent_formula() {
    for &(alpha, beta, sigma, mu) in &[(1.5, 0.5, 1.0, 0.0), (1.1, -0.5, 0.7, 0.3), (0.8, 0.9, 2.0, -1.0)] {
        let p = StableParams::new(alpha, beta, sigma, mu).unwrap();
        for t in [-2.0, -0.25, 0.5, 1.0, 3.0] {
            let d = (char_fn(&p, t) - oracle_char_fn(alpha, beta, sigma, mu, t)).norm();
            assert!(d < 1e-12, "alpha {alpha} beta {beta} t {t}: {d}");
        }
    }
}

#[test]
fn sampler_matches_char_fn_at_a_million_draws() {
    let mut rng = rng_from_seed(20_240_611);
    for &(alpha, beta, sigma) in &[(1.5, 0.5, 1.0), (1.7, 0.9, 1.0)] {
        let p = StableParams::new(alpha, beta, sigma, 0.0).unwrap();
        let x = sample_n(&p, 1_000_000, &mut rng);
        for t in [0.25, 0.5, 1.0, 2.0] {
            let d = (empirical_char_fn(&x, t) - oracle_char_fn(alpha, beta, sigma, 0.0, t)).norm();
            assert!(d < 5e-3, "alpha {alpha} beta {beta} t {t}: {d}");
        }
    }
}

#[test]
fn gaussian_endpoint_variances() {
    let mut rng = rng_from_seed(11);
    let std2: Vec<f64> = (0..1_000_000).map(|_| sample_standard(2.0, 0.4, &mut rng).unwrap()).collect();
    let v = variance(&std2);
    assert!((1.99..=2.01).contains(&v), "{v}");
    let inn = StableParams::innovation(2.0, 0.0).unwrap();
    let v = variance(&sample_n(&inn, 1_000_000, &mut rng));
    assert!((0.995..=1.005).contains(&v), "{v}");
}

#[test]
fn cauchy_branch_is_tangent() {
    let s = StandardStable::new(1.0, 0.0).unwrap();
    for &(u, w) in &[(0.3, 1.7), (-1.2, 0.05), (1.5, 4.0)] {
        assert!((s.transform(u, w) - f64::tan(u)).abs() < 1e-12);
    }
}

#[test]
fn standardization_identities() {
    let p = StableParams::new(1.5, 0.0, 2.0, 3.0).unwrap();
    let mut a = rng_from_seed(5);
    let mut b = rng_from_seed(5);
    for _ in 0..100 {
        let x = sample(&p, &mut a);
        let z = sample_standard(1.5, 0.0, &mut b).unwrap();
        assert!((x - (2.0 * z + 3.0)).abs() < 1e-12);
    }
    let p = StableParams::new(1.0, 1.0, 2.0, 0.0).unwrap();
    let shift = 4.0 / PI * 2f64.ln();
    for _ in 0..100 {
        let x = sample(&p, &mut a);
        let z = sample_standard(1.0, 1.0, &mut b).unwrap();
        assert!((x - (2.0 * z + shift)).abs() < 1e-10);
    }
}

#[test]
fn symmetric_laws_are_mirror_symmetric() {
    let p = StableParams::new(1.3, 0.0, 1.0, 0.0).unwrap();
    let x = sample_n(&p, 20_000, &mut rng_from_seed(77));
    let (a, b) = x.split_at(10_000);
    let neg: Vec<f64> = b.iter().map(|v| -v).collect();
    assert!(ks_two_sample(a, &neg) < ks_critical_1pct(a.len(), neg.len()));
}

#[test]
fn ecf_recovers_tail_index() {
    let mut rng = rng_from_seed(8);
    let p = ecf_estimate(&sample_n(&StableParams::standard(1.34, 0.0).unwrap(), 100_000, &mut rng)).unwrap();
    assert!((1.30..=1.38).contains(&p.alpha), "{p:?}");
    assert!(p.beta.abs() <= 0.05, "{p:?}");
    let g = ecf_estimate(&sample_n(&StableParams::innovation(2.0, 0.0).unwrap(), 100_000, &mut rng)).unwrap();
    assert!((1.95..=2.0).contains(&g.alpha), "{g:?}");
    assert!(ecf_estimate(&[4.2; 500]).is_err());
}

#[test]
fn reference_cdf_values() {
    let g = empirical_cdf(&StableParams::innovation(2.0, 0.0).unwrap(), 100_000).unwrap();
    assert!((0.495..=0.505).contains(&g.eval(0.0)));
    let c = empirical_cdf(&StableParams::new(1.0, 0.0, 1.0, 0.0).unwrap(), 100_000).unwrap();
    assert!((0.74..=0.76).contains(&c.eval(1.0)));
    let s = empirical_cdf(&StableParams::new(1.34, 0.0, 1.0, 0.0).unwrap(), 100_000).unwrap();
    assert!((0.49..=0.51).contains(&s.eval(0.0)));
    assert_eq!(s.eval(f64::NEG_INFINITY), 0.0);
    assert_eq!(s.eval(f64::INFINITY), 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampling_is_a_pure_function_of_the_seed(
        alpha in 0.3f64..2.0,
        beta in -1.0f64..1.0,
        seed in any::<u64>(),
    ) {
        let p = StableParams::new(alpha, beta, 1.0, 0.0).unwrap();
        let a = sample_n(&p, 50, &mut rng_from_seed(seed));
        let b = sample_n(&p, 50, &mut rng_from_seed(seed));
        prop_assert_eq!(a.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                        b.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }

    #[test]
    fn cdf_is_monotone(q in proptest::collection::vec(-50.0f64..50.0, 2..40)) {
        let cdf = tvstable::stable::cached_cdf(&StableParams::standard(1.5, 0.3).unwrap());
        let mut q = q;
        q.sort_by(|a, b| a.total_cmp(b));
        for w in q.windows(2) {
            prop_assert!(cdf.eval(w[0]) <= cdf.eval(w[1]));
        }
    }

    #[test]
    fn draws_are_finite(alpha in 0.5f64..2.0, beta in -1.0f64..1.0, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let s = StandardStable::new(alpha, beta).unwrap();
        for _ in 0..20 {
            let u: f64 = rng.random_range(-PI / 2.0..PI / 2.0);
            prop_assert!(s.transform(u, 1.0).is_finite());
        }
    }
}
