//! Nelder-Mead simplex minimization.

use std::io::Write;

use serde::{Deserialize, Serialize};

/// Simplex search settings. Convergence requires both the simplex diameter
/// (max-norm distance of every vertex from the best) below `xtol` and the
/// spread of objective values below `ftol`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NelderMead {
    pub max_iter: usize,
    pub xtol: f64,
    pub ftol: f64,
    /// Offset of the initial vertices along each coordinate.
    pub initial_step: f64,
    /// Fresh simplices built around the best point after convergence.
    pub restarts: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self { max_iter: 500, xtol: 1e-4, ftol: 1e-10, initial_step: 0.1, restarts: 0 }
    }
}

/// Result of a minimization. `trace` holds the best point after every
/// iteration, so its objective values are nonincreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub trace: Vec<TracePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub f: f64,
    pub x: Vec<f64>,
}

impl Minimum {
    /// Writes `iteration,objective,<names...>` rows.
    pub fn write_trace_csv<W: Write>(&self, mut out: W, names: &[String]) -> std::io::Result<()> {
        write!(out, "iteration,objective")?;
        for n in names {
            write!(out, ",{n}")?;
        }
        writeln!(out)?;
        for p in &self.trace {
            write!(out, "{},{}", p.iteration, p.f)?;
            for v in &p.x {
                write!(out, ",{v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

impl NelderMead {
    /// Minimizes `f` from `x0`. NaN objective values count as `+inf`.
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, mut f: F, x0: &[f64]) -> Minimum {
        let n = x0.len();
        let mut evaluations = 0;
        let mut eval = |x: &[f64]| {
            evaluations += 1;
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        if n == 0 {
            let v = eval(x0);
            return Minimum { x: vec![], f: v, iterations: 0, evaluations: 1, converged: true, trace: vec![] };
        }

        let mut trace = Vec::new();
        let mut iterations = 0;
        let mut start = x0.to_vec();
        let mut converged = false;
        let mut best = (start.clone(), f64::INFINITY);
        for _ in 0..=self.restarts {
            let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
            simplex.push(start.clone());
            for i in 0..n {
                let mut v = start.clone();
                v[i] += self.initial_step;
                simplex.push(v);
            }
            let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();
            converged = false;
            while iterations < self.max_iter {
                order(&mut simplex, &mut values);
                if self.has_converged(&simplex, &values) {
                    converged = true;
                    break;
                }
                iterations += 1;
                step(&mut simplex, &mut values, &mut eval);
                let i = argmin(&values);
                trace.push(TracePoint { iteration: iterations, f: values[i], x: simplex[i].clone() });
            }
            order(&mut simplex, &mut values);
            if values[0] <= best.1 {
                best = (simplex[0].clone(), values[0]);
            }
            if !converged {
                break;
            }
            start = best.0.clone();
        }
        // a restart can only keep or improve the best point, so the trace stays monotone
        let mut running = f64::INFINITY;
        for p in trace.iter_mut() {
            if p.f > running {
                p.f = running;
            }
            running = p.f;
        }
        Minimum { x: best.0, f: best.1, iterations, evaluations, converged, trace }
    }

    fn has_converged(&self, simplex: &[Vec<f64>], values: &[f64]) -> bool {
        let diameter = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        let spread = values[values.len() - 1] - values[0];
        diameter < self.xtol && spread.is_finite() && spread < self.ftol
    }
}

fn argmin(values: &[f64]) -> usize {
    let mut i = 0;
    for (k, v) in values.iter().enumerate() {
        if *v < values[i] {
            i = k;
        }
    }
    i
}

fn order(simplex: &mut Vec<Vec<f64>>, values: &mut Vec<f64>) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    *simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
    *values = idx.iter().map(|&i| values[i]).collect();
}

/// One reflection / expansion / contraction / shrink step on an ordered simplex.
fn step<E: FnMut(&[f64]) -> f64>(simplex: &mut [Vec<f64>], values: &mut [f64], eval: &mut E) {
    let n = simplex.len() - 1;
    let mut centroid = vec![0.0; n];
    for v in &simplex[..n] {
        for (c, x) in centroid.iter_mut().zip(v) {
            *c += x / n as f64;
        }
    }
    let along = |t: f64| -> Vec<f64> {
        centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (c - w)).collect()
    };
    let xr = along(1.0);
    let fr = eval(&xr);
    if fr < values[0] {
        let xe = along(2.0);
        let fe = eval(&xe);
        if fe < fr {
            simplex[n] = xe;
            values[n] = fe;
        } else {
            simplex[n] = xr;
            values[n] = fr;
        }
        return;
    }
    if fr < values[n - 1] {
        simplex[n] = xr;
        values[n] = fr;
        return;
    }
    // outside contraction if the reflection improved on the worst vertex
    let xc = if fr < values[n] { along(0.5) } else { along(-0.5) };
    let fc = eval(&xc);
    if fc < values[n].min(fr) {
        simplex[n] = xc;
        values[n] = fc;
        return;
    }
    let best = simplex[0].clone();
    for i in 1..=n {
        for (x, b) in simplex[i].iter_mut().zip(&best) {
            *x = b + 0.5 * (*x - b);
        }
        values[i] = eval(&simplex[i]);
    }
}
