use super::TvArmaModel;
use crate::error::{Error, Result};

/// Tolerance for the decay of MA companion products in [`check_ma_regular`].
pub const MA_DECAY_TOL: f64 = 1e-6;

/// Numerical MA-regularity check: products of the companion matrices of the
/// inversion recursion (MA coefficients times the scale ratio),
/// started at several anchor times and run backwards, must decay below `tol`
/// within `max(len, 1000)` steps. Also requires a positive scale curve and a
/// nonzero highest MA coefficient on the sampled times.
pub fn check_ma_regular(model: &TvArmaModel, len: usize, tol: f64) -> Result<()> {
    let n = len as f64;
    for t in 1..=len {
        let g = model.gamma().eval(t as f64 / n);
        if !(g > 0.0) {
            return Err(Error::NotInvertible(format!("gamma({}) = {g} is not positive", t as f64 / n)));
        }
    }
    let q = model.q();
    if q == 0 {
        return Ok(());
    }
    let last = &model.ma()[q - 1];
    if let Some(t) = (1..=len).find(|&t| last.eval(t as f64 / n) == 0.0) {
        return Err(Error::NotInvertible(format!(
            "highest-order MA coefficient vanishes at t = {t}; companion matrix is singular"
        )));
    }
    let horizon = len.max(1000);
    let anchors = [len, len * 3 / 4, len / 2, len / 4, 1];
    let mut row = vec![0.0; q];
    let mut coeffs = vec![0.0; q];
    for &anchor in &anchors {
        row.iter_mut().for_each(|v| *v = 0.0);
        row[0] = 1.0;
        let mut decayed = false;
        for step in 0..horizon {
            let t = anchor as f64 - step as f64;
            let g = model.gamma().eval(t / n);
            for (k, (c, curve)) in coeffs.iter_mut().zip(model.ma()).enumerate() {
                *c = curve.eval(t / n) * model.gamma().eval((t - (k + 1) as f64) / n) / g;
            }
            let r0 = row[0];
            for k in 0..q - 1 {
                row[k] = -r0 * coeffs[k] + row[k + 1];
            }
            row[q - 1] = -r0 * coeffs[q - 1];
            let norm = row.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if !norm.is_finite() {
                break;
            }
            if norm < tol {
                decayed = true;
                break;
            }
        }
        if !decayed {
            return Err(Error::NotInvertible(format!(
                "MA companion products from t = {anchor} do not decay below {tol:.1e}"
            )));
        }
    }
    Ok(())
}

/// Conditional inversion with zero pre-sample values:
///
/// `e_t = [sum_{j=0..p} a_j(t/T) X_{t-j} - sum_{k=1..q} b_k(t/T) gamma((t-k)/T) e_{t-k}] / gamma(t/T)`
///
/// where `x[i]` is `X_{i+1}` and `T = len`. No regularity checks.
pub fn invert_unchecked(model: &TvArmaModel, x: &[f64], len: usize) -> Vec<f64> {
    let (p, q) = (model.p(), model.q());
    let n = len as f64;
    let mut e = vec![0.0; x.len()];
    let mut ar = vec![0.0; p];
    let mut ma = vec![0.0; q];
    for i in 0..x.len() {
        let t = (i + 1) as f64;
        let u = t / n;
        for (c, curve) in ar.iter_mut().zip(model.ar()) {
            *c = curve.eval(u);
        }
        for (k, (c, curve)) in ma.iter_mut().zip(model.ma()).enumerate() {
            *c = curve.eval(u) * model.gamma().eval((t - (k + 1) as f64) / n);
        }
        let mut acc = x[i];
        for j in 1..=p.min(i) {
            acc += ar[j - 1] * x[i - j];
        }
        for k in 1..=q.min(i) {
            acc -= ma[k - 1] * e[i - k];
        }
        e[i] = acc / model.gamma().eval(u);
    }
    e
}

/// Recovers the innovations of an observed path `X_1..X_T`
/// (conditional on zero pre-sample values).
pub fn innovations_from_path(model: &TvArmaModel, x: &[f64]) -> Result<Vec<f64>> {
    innovations_on_grid(model, x, x.len())
}

/// As [`innovations_from_path`] with rescaled time `t / len`, for paths that
/// are a prefix of a longer horizon.
pub fn innovations_on_grid(model: &TvArmaModel, x: &[f64], len: usize) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::InsufficientData { needed: 1, have: 0 });
    }
    if len < x.len() {
        return Err(Error::InvalidParameter(format!("horizon {len} shorter than the path {}", x.len())));
    }
    check_ma_regular(model, len, MA_DECAY_TOL)?;
    let e = invert_unchecked(model, x, len);
    if let Some(pos) = e.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { t: pos as i64 + 1, context: "inversion diverged".into() });
    }
    Ok(e)
}
