//! Two-parameter decay fit of logical infidelity curves.
//!
//! Model: `I(t) = 0.5 * (1 - exp(-eps * (t - tau)))`, i.e. a fidelity that
//! relaxes to 1/2 at rate `eps` after an onset time `tau`. Below `tau` the
//! true curve grows like `t^(ell+1)` and the model does not apply; those
//! points are suppressed by the weight `1 / (1 + (t / tau_est)^-(ell+1))`.

use serde::{Deserialize, Serialize};

use crate::engines::TimeSeries;
use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 20;
pub const MAX_ITERATIONS: usize = 200;
pub const REL_STEP_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeUnit {
    /// Times measured in `1 / gamma_e`.
    InverseGammaE,
    Absolute,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub epsilon: f64,
    pub tau: f64,
    pub covariance: [[f64; 2]; 2],
    /// Norm of the weighted, scaled residual vector.
    pub residual_norm: f64,
    pub p_l: f64,
    pub iterations: usize,
    pub converged: bool,
    pub time_unit: TimeUnit,
}

pub fn model(t: f64, eps: f64, tau: f64) -> f64 {
    0.5 * (1.0 - (-eps * (t - tau)).exp())
}

fn bias_weight(t: f64, tau_est: f64, ell: usize) -> f64 {
    1.0 / (1.0 + (t / tau_est).powi(-(ell as i32 + 1)))
}

struct Problem<'a> {
    t: &'a [f64],
    y: &'a [f64],
    sw: Vec<f64>,
    scale: f64,
}

impl Problem<'_> {
    fn residuals(&self, p: [f64; 2]) -> Vec<f64> {
        self.t
            .iter()
            .zip(self.y)
            .zip(&self.sw)
            .map(|((&t, &y), &w)| w * (model(t, p[0], p[1]) - y) / self.scale)
            .collect()
    }

    fn jacobian(&self, p: [f64; 2]) -> Vec<[f64; 2]> {
        self.t
            .iter()
            .zip(&self.sw)
            .map(|(&t, &w)| {
                let e = (-p[0] * (t - p[1])).exp();
                let c = w / self.scale;
                [c * 0.5 * (t - p[1]) * e, -c * 0.5 * p[0] * e]
            })
            .collect()
    }
}

fn cost(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

fn normal_equations(j: &[[f64; 2]], r: &[f64]) -> ([[f64; 2]; 2], [f64; 2]) {
    let mut a = [[0.0; 2]; 2];
    let mut g = [0.0; 2];
    for (row, &ri) in j.iter().zip(r) {
        for u in 0..2 {
            g[u] += row[u] * ri;
            for v in 0..2 {
                a[u][v] += row[u] * row[v];
            }
        }
    }
    (a, g)
}

fn solve2(a: [[f64; 2]; 2], b: [f64; 2]) -> Option<[f64; 2]> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some([(b[0] * a[1][1] - b[1] * a[0][1]) / det, (a[0][0] * b[1] - a[1][0] * b[0]) / det])
}

struct LmOutcome {
    p: [f64; 2],
    iterations: usize,
    converged: bool,
    cost: f64,
    jtj: [[f64; 2]; 2],
}

/// Levenberg-Marquardt with Marquardt's diagonal scaling.
fn levenberg_marquardt(prob: &Problem, p0: [f64; 2]) -> LmOutcome {
    let mut p = p0;
    let mut r = prob.residuals(p);
    let mut c = cost(&r);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let j = prob.jacobian(p);
        let (a, g) = normal_equations(&j, &r);
        let mut accepted = false;
        while lambda < 1e20 {
            let damped = [[a[0][0] * (1.0 + lambda), a[0][1]], [a[1][0], a[1][1] * (1.0 + lambda)]];
            let Some(step) = solve2(damped, [-g[0], -g[1]]) else {
                lambda *= 10.0;
                continue;
            };
            let trial = [p[0] + step[0], p[1] + step[1]];
            if trial.iter().all(|x| x.is_finite()) {
                let rt = prob.residuals(trial);
                let ct = cost(&rt);
                if ct.is_finite() && ct <= c {
                    let rel = (step[0] / p[0]).abs().max((step[1] / p[1]).abs());
                    p = trial;
                    r = rt;
                    c = ct;
                    lambda = (lambda / 10.0).max(1e-12);
                    accepted = true;
                    converged = rel < REL_STEP_TOL;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !accepted {
            // no downhill step at any damping: stationary to working precision
            converged = true;
        }
        if converged {
            break;
        }
    }
    let (jtj, _) = normal_equations(&prob.jacobian(p), &r);
    LmOutcome { p, iterations, converged, cost: c, jtj }
}

/// Fits `(eps, tau)` to an infidelity series whose times are in units of
/// `1 / gamma_e`.
pub fn fit_infidelity(series: &TimeSeries, ell: usize) -> Result<FitResult> {
    fit_infidelity_in(series, ell, TimeUnit::InverseGammaE)
}

pub fn fit_infidelity_in(series: &TimeSeries, ell: usize, time_unit: TimeUnit) -> Result<FitResult> {
    let (t, y) = (&series.times[..], &series.values[..]);
    if t.len() != y.len() {
        return Err(Error::DegenerateData(format!("{} times vs {} values", t.len(), y.len())));
    }
    if t.len() < MIN_POINTS {
        return Err(Error::DegenerateData(format!("{} points, need at least {MIN_POINTS}", t.len())));
    }
    if t.iter().chain(y).any(|v| !v.is_finite()) || t.iter().any(|&v| v <= 0.0) {
        return Err(Error::DegenerateData("times must be positive and values finite".into()));
    }
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (m, k) = (t.len() - 1, t.len() - 2);
    let slope = (y[m] - y[k]) / (t[m] - t[k]);
    if !(slope > 0.0) || scale == 0.0 {
        return Err(Error::DegenerateData("series is flat at its end".into()));
    }
    let mut p = [2.0 * slope, (t[m] - y[m] / slope).max(1e-3 * t[m])];
    let mut outcome = None;
    for _ in 0..2 {
        let sw = t.iter().map(|&ti| bias_weight(ti, p[1], ell).sqrt()).collect();
        let prob = Problem { t, y, sw, scale };
        let o = levenberg_marquardt(&prob, p);
        p = o.p;
        if !(p[0] > 0.0 && p[1] > 0.0) {
            return Err(Error::FitFailure(format!("non-positive parameters eps = {}, tau = {}", p[0], p[1])));
        }
        outcome = Some(o);
    }
    let o = outcome.expect("two passes");
    let dof = (t.len() - 2) as f64;
    let s2 = o.cost / dof;
    let det = o.jtj[0][0] * o.jtj[1][1] - o.jtj[0][1] * o.jtj[1][0];
    let covariance = if det != 0.0 {
        [[s2 * o.jtj[1][1] / det, -s2 * o.jtj[0][1] / det], [-s2 * o.jtj[1][0] / det, s2 * o.jtj[0][0] / det]]
    } else {
        [[f64::INFINITY; 2]; 2]
    };
    Ok(FitResult {
        epsilon: p[0],
        tau: p[1],
        covariance,
        residual_norm: o.cost.sqrt(),
        p_l: p[0] * p[1],
        iterations: o.iterations,
        converged: o.converged,
        time_unit,
    })
}

/// `p_L = eps * tau`, defined only for times in units of `1 / gamma_e`.
pub fn logical_error_rate(fit: &FitResult) -> Result<f64> {
    if fit.time_unit != TimeUnit::InverseGammaE {
        return Err(Error::InvalidConfig("p_L needs tau in units of 1/gamma_e".into()));
    }
    Ok(fit.epsilon * fit.tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::log_spaced;

    fn synthetic(eps: f64, tau: f64) -> TimeSeries {
        let times = log_spaced(1e-2, 30.0, 60);
        let values = times.iter().map(|&t| model(t, eps, tau)).collect();
        TimeSeries { times, values, stderr: None }
    }

    #[test]
    fn noiseless_round_trip() {
        let fit = fit_infidelity(&synthetic(0.1, 2.0), 2).unwrap();
        assert!((fit.epsilon / 0.1 - 1.0).abs() < 1e-6, "{fit:?}");
        assert!((fit.tau / 2.0 - 1.0).abs() < 1e-6, "{fit:?}");
        assert!((logical_error_rate(&fit).unwrap() - 0.2).abs() < 1e-6);
    }

    #[test]
    fn flat_series_is_degenerate() {
        let times = log_spaced(1e-2, 3.0, 30);
        let s = TimeSeries { values: vec![0.5; 30], times, stderr: None };
        assert!(matches!(fit_infidelity(&s, 1), Err(Error::DegenerateData(_))));
    }

    #[test]
    fn unit_tag_checked() {
        let fit = fit_infidelity_in(&synthetic(0.1, 2.0), 2, TimeUnit::Absolute).unwrap();
        assert!(logical_error_rate(&fit).is_err());
    }
}
