use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;
use tvstable::analysis::{
    error_metrics, fit_errors, format_table, jarque_bera, residual_moments, run_mc, stabilized_pp, variogram, Method,
    Scenario, Summary,
};
use tvstable::curve::CoeffCurve;
use tvstable::params::{AlphaSpec, CurveLayout, ModelTemplate};
use tvstable::rng::{derive_seed, rng_from_seed};
use tvstable::stable::{sample_n, StableParams};
use tvstable::tvarma::{simulate, TvArmaModel};

fn normals(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

#[test]
fn gaussian_moments() {
    let m = residual_moments(&normals(100_000, 1)).unwrap();
    assert!(m.skewness.abs() <= 0.03, "{m:?}");
    assert!((2.95..=3.05).contains(&m.kurtosis), "{m:?}");
}

#[test]
fn two_point_moments() {
    let e: Vec<f64> = (0..1000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let m = residual_moments(&e).unwrap();
    assert!(m.skewness.abs() < 1e-12);
    assert!((m.kurtosis - 1.0).abs() < 1e-12);
}

#[test]
fn jarque_bera_rejects_heavy_tails() {
    let x = sample_n(&StableParams::standard(1.5, 0.0).unwrap(), 5000, &mut rng_from_seed(2));
    let m = residual_moments(&x).unwrap();
    assert!(m.p_value < 1e-6, "{m:?}");
    let (jb, p) = jarque_bera(1000, 0.0, 3.0);
    assert_eq!((jb, p), (0.0, 1.0));
}

#[test]
fn stabilized_pp_self_test_and_misspecification() {
    let params = StableParams::new(1.34, 0.0, 1.0, 0.0).unwrap();
    let e = sample_n(&params, 5000, &mut rng_from_seed(3));
    let pp = stabilized_pp(&e, &params).unwrap();
    assert!(pp.max_deviation < 0.02, "{}", pp.max_deviation);

    let cauchy = StableParams::new(1.0, 0.0, 1.0, 0.0).unwrap();
    let pp = stabilized_pp(&normals(5000, 4), &cauchy).unwrap();
    assert!(pp.max_deviation > 0.05, "{}", pp.max_deviation);

    let one = stabilized_pp(&[0.0], &params).unwrap();
    assert!((one.r[0] - 0.5).abs() < 1e-12);
    assert!((one.s[0] - 0.5).abs() < 0.01, "{}", one.s[0]);
    assert!(stabilized_pp(&[], &params).is_err());
}

#[test]
fn variogram_of_constant_and_gaussian_noise() {
    assert!(variogram(&[2.0; 100], 10).unwrap().iter().all(|&v| v == 0.0));
    let v = variogram(&normals(100_000, 5), 50).unwrap();
    assert!(v.iter().all(|x| (x - 1.0).abs() < 0.1), "{v:?}");
    assert!(variogram(&[1.0, 2.0], 2).is_err());
}

#[test]
fn variogram_of_infinite_variance_noise_does_not_settle() {
    let p = StableParams::standard(1.3, 0.0).unwrap();
    let mut rng = rng_from_seed(6);
    let pooled: Vec<f64> =
        (0..20).flat_map(|_| variogram(&sample_n(&p, 10_000, &mut rng), 50).unwrap()).collect();
    let max = pooled.iter().cloned().fold(f64::MIN, f64::max);
    let min = pooled.iter().cloned().fold(f64::MAX, f64::min);
    assert!(max / min > 10.0, "{max} / {min}");
}

#[test]
fn error_metric_special_cases() {
    let z = error_metrics(&[0.0; 10]).unwrap();
    assert_eq!((z.mse, z.rmse, z.mae), (0.0, 0.0, 0.0));
    let c = 0.37;
    let e: Vec<f64> = (0..10).map(|i| if i % 2 == 0 { c } else { -c }).collect();
    let m = error_metrics(&e).unwrap();
    assert!((m.mse - c * c).abs() < 1e-15 && (m.mae - c).abs() < 1e-15);
    assert!(error_metrics(&[]).is_err());
}

#[test]
fn fit_errors_follow_the_residual_scale() {
    let m = TvArmaModel::new(
        vec![CoeffCurve::linear(-0.4, 0.1)],
        vec![CoeffCurve::constant(0.2)],
        CoeffCurve::constant(0.01),
        1.34,
        0.0,
    )
    .unwrap();
    let x = simulate(&m, 1000, 500, &mut rng_from_seed(7)).unwrap();
    let f = fit_errors(&m, &x).unwrap();
    assert!(f.mae > 1e-3 && f.mae < 1e-1, "{f:?}");
}

#[test]
fn single_replication_has_no_spread() {
    let s = Summary::of(&[0.25]);
    assert_eq!(s.mean, 0.25);
    assert!(s.se.is_none() && s.skewness.is_none() && s.kurtosis.is_none());
}

fn small_scenario(replications: usize) -> Scenario {
    Scenario {
        id: "small".into(),
        template: ModelTemplate { layout: CurveLayout::uniform(1, 0, 1, 0), alpha: AlphaSpec::Known(1.9), beta: 0.9 },
        truth: vec![-0.3, 0.8, 1.0],
        len: 300,
        replications,
        paths: 3,
        burn_in: 200,
        methods: vec![Method::Indirect, Method::Whittle],
    }
}

#[test]
fn monte_carlo_is_reproducible_and_tabulated() {
    let s = small_scenario(3);
    let a = run_mc(&s, 2024, 1).unwrap();
    let b = run_mc(&s, 2024, 2).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.rows[1].data_seed, derive_seed(2024, &[1, 0]));
    let ind = a.aggregate("indirect").unwrap();
    assert_eq!(ind.included + ind.failed, 3);

    let table = format_table(&[a], false);
    let header = table.lines().next().unwrap();
    assert!(header.starts_with('T'));
    assert!(header.contains("IM:ar1_0") && header.contains("BWE:gamma"), "{header}");

    let mut zero = small_scenario(0);
    assert!(run_mc(&zero, 1, 1).is_err());
    zero.replications = 1;
    let one = run_mc(&zero, 1, 1).unwrap();
    let agg = one.aggregate("indirect").unwrap();
    assert_eq!(agg.included, 1);
    assert!(agg.summaries.iter().all(|s| s.se.is_none()));
    assert_eq!(agg.summaries[0].mean, one.rows[0].indirect.as_ref().unwrap().values[0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn variogram_is_nonnegative(x in proptest::collection::vec(-1e3f64..1e3, 3..200), lag in 1usize..3) {
        prop_assert!(variogram(&x, lag).unwrap().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn pp_abscissae_increase(x in proptest::collection::vec(-50.0f64..50.0, 1..200)) {
        let pp = stabilized_pp(&x, &StableParams::standard(1.5, 0.0).unwrap()).unwrap();
        for w in pp.r.windows(2) {
            prop_assert!(w[1] > w[0]);
        }
        for w in pp.s.windows(2) {
            prop_assert!(w[1] >= w[0]);
        }
    }

    #[test]
    fn rmse_is_root_mse(e in proptest::collection::vec(-10.0f64..10.0, 1..100)) {
        let m = error_metrics(&e).unwrap();
        prop_assert!((m.rmse * m.rmse - m.mse).abs() <= 1e-12 * (1.0 + m.mse));
        prop_assert!(m.mae <= m.rmse + 1e-12);
    }
}
