//! Polynomial coefficient curves of rescaled time and local root checks.

use serde::{Deserialize, Serialize};

/// `c(u) = c_0 + c_1 u + ... + c_d u^d`, evaluated at `u = 0` for `u < 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoeffCurve {
    coeffs: Vec<f64>,
}

impl CoeffCurve {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a curve needs at least one coefficient");
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn linear(c0: f64, c1: f64) -> Self {
        Self { coeffs: vec![c0, c1] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        let u = if u < 0.0 { 0.0 } else { u };
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c)
    }

    /// Evaluates at `t / len` for `t = 1..=len`.
    pub fn sample_grid(&self, len: usize) -> Vec<f64> {
        let n = len as f64;
        (1..=len).map(|t| self.eval(t as f64 / n)).collect()
    }

    /// Smallest value over an evenly spaced grid of `points` nodes on [0, 1].
    pub fn min_on_unit(&self, points: usize) -> f64 {
        let m = points.max(2) - 1;
        (0..=m)
            .map(|i| self.eval(i as f64 / m as f64))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Schur-Cohn test: every root of `1 + c_1 z + ... + c_k z^k` lies strictly
/// outside the circle of radius `1 / radius`, i.e. the reflected polynomial
/// has all roots inside the disk of radius `radius`. With `radius = 1` this
/// is the stationarity / invertibility condition of a local ARMA operator.
pub fn roots_outside(coeffs: &[f64], radius: f64) -> bool {
    // reversed monic polynomial z^k + a_1 z^{k-1} + ... + a_k, rescaled so the
    // test becomes "all roots inside the unit disk"
    let mut a: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| c / radius.powi(i as i32 + 1))
        .collect();
    while let Some(&last) = a.last() {
        if last == 0.0 {
            a.pop();
        } else {
            break;
        }
    }
    while !a.is_empty() {
        let k = a.len();
        let refl = a[k - 1];
        if !(refl.abs() < 1.0) {
            return false;
        }
        let denom = 1.0 - refl * refl;
        let next: Vec<f64> = (0..k - 1).map(|i| (a[i] - refl * a[k - 2 - i]) / denom).collect();
        a = next;
    }
    true
}

/// Local operator coefficients `(c_1(u), ..., c_k(u))` of a list of curves.
pub fn local_coeffs(curves: &[CoeffCurve], u: f64) -> Vec<f64> {
    curves.iter().map(|c| c.eval(u)).collect()
}

/// Whether the local polynomial `1 + sum c_j(u) z^j` keeps its roots outside
/// `|z| = 1 / radius` at every node of a grid on [0, 1].
pub fn curves_stable_on_grid(curves: &[CoeffCurve], points: usize, radius: f64) -> bool {
    if curves.is_empty() {
        return true;
    }
    let m = points.max(2) - 1;
    (0..=m).all(|i| roots_outside(&local_coeffs(curves, i as f64 / m as f64), radius))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_and_clamping() {
        let c = CoeffCurve::linear(-0.2, 0.6);
        assert!((c.eval(0.5) - 0.1).abs() < 1e-15);
        assert_eq!(c.eval(-3.0), c.eval(0.0));
        let q = CoeffCurve::new(vec![1.0, 2.0, 3.0]);
        assert!((q.eval(2.0) - 17.0).abs() < 1e-12);
        assert_eq!(q.degree(), 2);
        assert_eq!(CoeffCurve::constant(4.0).sample_grid(3), vec![4.0; 3]);
    }

    #[test]
    fn schur_test_first_order() {
        // 1 + c z has root -1/c
        assert!(roots_outside(&[0.5], 1.0));
        assert!(roots_outside(&[-0.99], 1.0));
        assert!(!roots_outside(&[1.0], 1.0));
        assert!(!roots_outside(&[-1.5], 1.0));
        assert!(!roots_outside(&[0.5], 0.4));
        assert!(roots_outside(&[], 1.0));
    }

    #[test]
    fn schur_test_second_order() {
        // (1 - 0.5z)(1 - 0.8z) = 1 - 1.3z + 0.4z^2
        assert!(roots_outside(&[-1.3, 0.4], 1.0));
        // (1 - 0.5z)(1 - 1.25z) = 1 - 1.75z + 0.625z^2
        assert!(!roots_outside(&[-1.75, 0.625], 1.0));
        // complex pair with modulus 1/0.9: 1 + 0.81 z^2
        assert!(roots_outside(&[0.0, 0.81], 1.0));
        assert!(!roots_outside(&[0.0, 1.21], 1.0));
        // trailing zero coefficient reduces the order
        assert!(roots_outside(&[0.5, 0.0], 1.0));
    }

    #[test]
    fn grid_check_over_time() {
        let ok = vec![CoeffCurve::linear(-0.3, 0.8)];
        assert!(curves_stable_on_grid(&ok, 101, 1.0));
        let bad = vec![CoeffCurve::linear(-0.3, 1.5)];
        assert!(!curves_stable_on_grid(&bad, 101, 1.0));
    }
}
