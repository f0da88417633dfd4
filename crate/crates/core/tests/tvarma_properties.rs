use std::f64::consts::FRAC_1_SQRT_2;

use proptest::prelude::*;
use rand::Rng;
use tvstable::analysis::{ks_critical_1pct, ks_two_sample};
use tvstable::curve::CoeffCurve;
use tvstable::rng::rng_from_seed;
use tvstable::stable::{char_fn, empirical_char_fn, sample_n, StableParams};
use tvstable::tvarma::{
    draw_innovations, green_function, innovations_from_path, innovations_needed, ma_weights, marginal_law, predict,
    simulate, simulate_with_innovations, weighted_sum_law, TvArmaModel,
};

fn model(ar: Vec<CoeffCurve>, ma: Vec<CoeffCurve>, gamma: CoeffCurve, alpha: f64, beta: f64) -> TvArmaModel {
    TvArmaModel::new(ar, ma, gamma, alpha, beta).unwrap()
}

// Textbook psi-weights of (1 - phi B) X = (1 + theta B) e.
fn psi_weights(phi: f64, theta: f64, n: usize) -> Vec<f64> {
    let mut psi = vec![1.0];
    for j in 1..=n {
        let prev = psi[j - 1];
        psi.push(phi * prev + if j == 1 { theta } else { 0.0 });
    }
    psi
}

// Plain recursion for a tvAR(1), written without the crate's filter.
fn naive_tvar1(a: &CoeffCurve, eps: &[f64], len: usize, burn_in: usize) -> Vec<f64> {
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(len);
    for (i, &e) in eps.iter().enumerate() {
        let t = i as f64 + 1.0 - burn_in as f64;
        let x = -a.eval(t / len as f64) * prev + e;
        if i >= burn_in {
            out.push(x);
        }
        prev = x;
    }
    out
}

#[test]
fn spike_frequency_matches_naive_recursion() {
    let a = CoeffCurve::linear(-0.2, 0.6);
    let m = model(vec![a.clone()], vec![], CoeffCurve::constant(1.0), 1.7, 0.0);
    let len = 10_000;
    let x = simulate(&m, len, 500, &mut rng_from_seed(1)).unwrap();
    let eps = sample_n(m.innovation(), len + 500, &mut rng_from_seed(2));
    let y = naive_tvar1(&a, &eps, len, 500);
    let frac = |v: &[f64]| v.iter().filter(|x| x.abs() > 5.0).count() as f64 / v.len() as f64;
    let (fx, fy) = (frac(&x), frac(&y));
    assert!(fy > 0.0);
    assert!(fx >= 0.5 * fy && fx <= 2.0 * fy, "{fx} vs {fy}");
}

#[test]
fn simulator_equals_naive_recursion_on_shared_innovations() {
    let a = CoeffCurve::linear(-0.3, 0.8);
    let m = model(vec![a.clone()], vec![], CoeffCurve::constant(1.0), 1.9, 0.9);
    let eps = draw_innovations(m.innovation(), innovations_needed(&m, 300, 100), &mut rng_from_seed(4));
    let x = simulate_with_innovations(&m, 300, 100, &eps).unwrap();
    let y = naive_tvar1(&a, &eps, 300, 100);
    for (u, v) in x.iter().zip(&y) {
        assert!((u - v).abs() < 1e-12);
    }
}

#[test]
fn gaussian_ar1_autocorrelation() {
    let m = model(vec![CoeffCurve::constant(-0.5)], vec![], CoeffCurve::constant(1.0), 2.0, 0.0);
    let x = simulate(&m, 100_000, 500, &mut rng_from_seed(9)).unwrap();
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let c0: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    let c1: f64 = x.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum();
    assert!((c1 / c0 - 0.5).abs() < 0.02, "{}", c1 / c0);
}

#[test]
fn psi_weights_of_arma11() {
    let m = model(vec![CoeffCurve::constant(-0.5)], vec![CoeffCurve::constant(0.3)], CoeffCurve::constant(1.0), 1.5, 0.0);
    let w = ma_weights(&m, 100, 100, 50, 1e-10).unwrap();
    for (a, b) in w.weights.iter().zip(psi_weights(0.5, 0.3, 50)) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn random_arma11_weights_match_psi_recursion() {
    let mut rng = rng_from_seed(2024);
    for _ in 0..20 {
        let phi: f64 = rng.random_range(-0.9..0.9);
        let theta: f64 = rng.random_range(-0.9..0.9);
        let m = model(vec![CoeffCurve::constant(-phi)], vec![CoeffCurve::constant(theta)], CoeffCurve::constant(1.0), 1.5, 0.0);
        let w = ma_weights(&m, 500, 500, 300, 1e-10).unwrap();
        let psi = psi_weights(phi, theta, 100);
        for j in 0..=100 {
            assert!((w.weights[j] - psi[j]).abs() < 1e-10, "phi {phi} theta {theta} j {j}");
        }
    }
}

#[test]
fn tvar1_weights_are_explicit_products() {
    let gamma = CoeffCurve::linear(1.0, 0.5);
    let m = model(vec![CoeffCurve::linear(-0.2, 0.6)], vec![], gamma.clone(), 1.7, 0.0);
    let len = 200;
    let w = ma_weights(&m, len as i64, len, 60, 1e-10).unwrap();
    let n = len as f64;
    assert_eq!(w.weights[0], gamma.eval(1.0));
    for j in 0..=40usize {
        let prod: f64 = (0..j).map(|l| 0.2 - 0.6 * (len - l) as f64 / n).product();
        let expect = prod * gamma.eval((len - j) as f64 / n);
        assert!((w.weights[j] - expect).abs() < 1e-14, "j {j}");
    }
}

#[test]
fn green_function_solves_homogeneous_equation() {
    let a1 = CoeffCurve::linear(-0.5, 0.4);
    let a2 = CoeffCurve::linear(0.2, -0.1);
    let m = model(vec![a1.clone(), a2.clone()], vec![], CoeffCurve::constant(1.0), 1.5, 0.0);
    let len = 120;
    let n = len as f64;
    let s = 30i64;
    for t in (s + 1)..=len as i64 {
        let u = t as f64 / n;
        let r = green_function(&m, t, s, len).unwrap()
            + a1.eval(u) * green_function(&m, t - 1, s, len).unwrap()
            + a2.eval(u) * green_function(&m, t - 2, s, len).unwrap();
        assert!(r.abs() < 1e-10, "t {t}: {r}");
    }
    assert_eq!(green_function(&m, 40, 40, len).unwrap(), 1.0);
}

#[test]
fn weights_approach_local_stationary_weights() {
    let a = CoeffCurve::linear(-0.2, 0.6);
    let m = model(vec![a.clone()], vec![], CoeffCurve::constant(1.0), 1.7, 0.0);
    let gap = |len: usize| {
        let t = (len / 2) as i64;
        let u = t as f64 / len as f64;
        let w = ma_weights(&m, t, len, 200, 1e-10).unwrap();
        (0..=30).map(|j| (w.weights[j] - (-a.eval(u)).powi(j as i32)).abs()).fold(0.0, f64::max)
    };
    let (g500, g1000) = (gap(500), gap(1000));
    assert!(g1000 <= g500 / 2.0, "{g500} -> {g1000}");
}

#[test]
fn marginal_law_closed_form() {
    let (alpha, phi) = (1.5, 0.5);
    let m = model(vec![CoeffCurve::constant(-phi)], vec![], CoeffCurve::constant(1.0), alpha, 0.0);
    let w = ma_weights(&m, 100, 100, 200, 1e-10).unwrap();
    let law = marginal_law(&w, m.innovation()).unwrap();
    let expect = FRAC_1_SQRT_2 * (1.0 / (1.0 - phi.powf(alpha))).powf(1.0 / alpha);
    assert!((law.sigma - expect).abs() < 1e-8);

    let skewed = m.with_innovation(StableParams::innovation(alpha, 1.0).unwrap()).unwrap();
    assert_eq!(marginal_law(&w, skewed.innovation()).unwrap().beta, 1.0);
}

#[test]
fn simulated_marginal_passes_ks_against_closed_form() {
    let (alpha, phi, beta) = (1.5, 0.5, 0.4);
    let m = model(vec![CoeffCurve::constant(-phi)], vec![], CoeffCurve::constant(1.0), alpha, beta);
    let w = ma_weights(&m, 60, 60, 200, 1e-10).unwrap();
    let law = marginal_law(&w, m.innovation()).unwrap();
    let n = 100_000;
    let mut rng = rng_from_seed(31);
    let x: Vec<f64> = (0..n).map(|_| *simulate(&m, 60, 100, &mut rng).unwrap().last().unwrap()).collect();
    let y = sample_n(&law, n, &mut rng);
    assert!(ks_two_sample(&x, &y) < ks_critical_1pct(n, n));
}

#[test]
fn finite_weighted_sum_is_stable() {
    let weights = [1.0, -0.7, 0.4, 0.9, -0.2, 0.15, 0.3, -0.05, 0.6, 0.1, -0.4];
    let inn = StableParams::innovation(1.6, 0.7).unwrap();
    let law = weighted_sum_law(&weights, &inn).unwrap();
    let mut rng = rng_from_seed(12);
    let s: Vec<f64> = (0..400_000)
        .map(|_| sample_n(&inn, weights.len(), &mut rng).iter().zip(&weights).map(|(e, a)| a * e).sum())
        .collect();
    for t in [0.25, 0.5, 1.0] {
        let d = (empirical_char_fn(&s, t) - char_fn(&law, t)).norm();
        assert!(d < 6e-3, "t {t}: {d}");
    }
}

#[test]
fn tvma1_round_trip() {
    let m = model(vec![], vec![CoeffCurve::linear(0.35, -0.6)], CoeffCurve::linear(1.0, 0.4), 1.5, 0.0);
    let (len, burn) = (400, 200);
    let eps = draw_innovations(m.innovation(), innovations_needed(&m, len, burn), &mut rng_from_seed(5));
    let x = simulate_with_innovations(&m, len, burn, &eps).unwrap();
    let e = innovations_from_path(&m, &x).unwrap();
    // innovation of time t sits at eps[burn + q + t - 1]
    for t in 51..=len {
        assert!((e[t - 1] - eps[burn + 1 + t - 1]).abs() < 1e-8, "t {t}");
    }
}

#[test]
fn tvarma11_round_trip() {
    let m = model(
        vec![CoeffCurve::linear(-0.4, 0.1)],
        vec![CoeffCurve::linear(0.1, 0.3)],
        CoeffCurve::constant(1.0),
        1.8,
        0.3,
    );
    let (len, burn) = (1000, 500);
    let eps = draw_innovations(m.innovation(), innovations_needed(&m, len, burn), &mut rng_from_seed(6));
    let x = simulate_with_innovations(&m, len, burn, &eps).unwrap();
    let e = innovations_from_path(&m, &x).unwrap();
    let worst = (100..=len).map(|t| (e[t - 1] - eps[burn + t]).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn one_step_forecast_formulas() {
    let b = CoeffCurve::linear(0.35, -0.6);
    let g = CoeffCurve::linear(1.2, 0.3);
    let m = model(vec![], vec![b.clone()], g.clone(), 1.5, 0.0);
    let x = simulate(&m, 300, 100, &mut rng_from_seed(3)).unwrap();
    let f = predict(&m, &x, 3).unwrap();
    let len = 303.0;
    let e = tvstable::tvarma::innovations_on_grid(&m, &x, 303).unwrap();
    let expect = b.eval(301.0 / len) * g.eval(300.0 / len) * e[299];
    assert!((f.point[0] - expect).abs() < 1e-12);
    assert_eq!(&f.point[1..], &[0.0, 0.0]);
    let d1 = FRAC_1_SQRT_2.powf(1.5) * g.eval(301.0 / len).powf(1.5);
    assert!((f.dispersion[0] - d1).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn simulation_is_deterministic(
        a0 in -0.6f64..0.6,
        a1 in -0.3f64..0.3,
        alpha in 0.8f64..2.0,
        seed in any::<u64>(),
    ) {
        let m = model(vec![CoeffCurve::linear(a0, a1)], vec![CoeffCurve::constant(0.3)], CoeffCurve::constant(1.0), alpha, 0.0);
        let x = simulate(&m, 200, 50, &mut rng_from_seed(seed)).unwrap();
        let y = simulate(&m, 200, 50, &mut rng_from_seed(seed)).unwrap();
        prop_assert_eq!(x.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), y.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }

    #[test]
    fn leading_weight_is_the_scale(t in 1i64..400, g0 in 0.1f64..3.0, g1 in 0.0f64..2.0) {
        let gamma = CoeffCurve::linear(g0, g1);
        let m = model(vec![CoeffCurve::constant(-0.4)], vec![], gamma.clone(), 1.5, 0.0);
        let w = ma_weights(&m, t, 400, 100, 1e-10).unwrap();
        prop_assert_eq!(w.weights[0], gamma.eval(t as f64 / 400.0));
    }

    #[test]
    fn ar1_dispersions_are_nondecreasing(phi in -0.85f64..0.85, seed in any::<u64>()) {
        // weights do not move with the forecast origin only for constant coefficients
        let m = model(vec![CoeffCurve::constant(-phi)], vec![], CoeffCurve::constant(1.0), 1.7, 0.0);
        let x = simulate(&m, 100, 50, &mut rng_from_seed(seed)).unwrap();
        let f = predict(&m, &x, 6).unwrap();
        for d in f.dispersion.windows(2) {
            prop_assert!(d[1] >= d[0]);
        }
    }
}
