//! Descriptive statistics and two-sample tests.

use serde::{Deserialize, Serialize};

/// Central moments `(mean, m2, m3, m4)` with divisor `n`.
pub fn central_moments(x: &[f64]) -> (f64, f64, f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in x {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (mean, m2 / n, m3 / n, m4 / n)
}

/// Aggregate of one estimate column. `se` is the replication standard
/// deviation (divisor `n - 1`); kurtosis is non-excess (Gaussian = 3).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub se: Option<f64>,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
}

impl Summary {
    pub fn of(x: &[f64]) -> Self {
        let n = x.len();
        if n == 0 {
            return Self { count: 0, mean: f64::NAN, se: None, skewness: None, kurtosis: None };
        }
        let (mean, m2, m3, m4) = central_moments(x);
        let se = (n > 1).then(|| (m2 * n as f64 / (n - 1) as f64).sqrt());
        let shape = n > 1 && m2 > 0.0;
        Self {
            count: n,
            mean,
            se,
            skewness: shape.then(|| m3 / m2.powf(1.5)),
            kurtosis: shape.then(|| m4 / (m2 * m2)),
        }
    }
}

/// Jarque-Bera statistic `n/6 (S^2 + (K-3)^2/4)` and its chi-square(2)
/// p-value `exp(-JB/2)`.
pub fn jarque_bera(n: usize, skewness: f64, kurtosis: f64) -> (f64, f64) {
    let jb = n as f64 / 6.0 * (skewness * skewness + (kurtosis - 3.0).powi(2) / 4.0);
    (jb, (-jb / 2.0).exp())
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Asymptotic 1% critical value `1.628 sqrt((n + m) / (n m))`.
pub fn ks_critical_1pct(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    1.628 * ((n + m) / (n * m)).sqrt()
}
