//! Least-squares Gaussian fit `y = a exp(-b t^2)` used to characterize the
//! initial decay of correlation functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianFit {
    pub amplitude: f64,
    pub rate: f64,
    /// Coefficient of determination in linear (not log) space.
    pub r_squared: f64,
}

fn residual_sum(t: &[f64], y: &[f64], a: f64, b: f64) -> f64 {
    t.iter()
        .zip(y)
        .map(|(&t, &y)| {
            let r = y - a * (-b * t * t).exp();
            r * r
        })
        .sum()
}

/// Levenberg-Marquardt on `(a, b)`, seeded by a log-linear fit.
pub fn fit_gaussian(t: &[f64], y: &[f64]) -> Result<GaussianFit> {
    if t.len() != y.len() || t.len() < 3 {
        return Err(Error::InvalidParameter("Gaussian fit needs >= 3 matching points".into()));
    }
    let pos: Vec<(f64, f64)> = t
        .iter()
        .zip(y)
        .filter(|&(_, &y)| y > 0.0)
        .map(|(&t, &y)| (t * t, y.ln()))
        .collect();
    if pos.len() < 2 {
        return Err(Error::InvalidParameter("Gaussian fit needs positive samples".into()));
    }
    let n = pos.len() as f64;
    let mx = pos.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pos.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pos.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pos.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let (mut a, mut b) = ((my - slope * mx).exp(), -slope);

    let mut lambda = 1e-3;
    let mut cost = residual_sum(t, y, a, b);
    for _ in 0..200 {
        // normal equations of the 2-parameter model
        let (mut jaa, mut jab, mut jbb, mut ga, mut gb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&ti, &yi) in t.iter().zip(y) {
            let e = (-b * ti * ti).exp();
            let r = yi - a * e;
            let da = e;
            let db = -a * ti * ti * e;
            jaa += da * da;
            jab += da * db;
            jbb += db * db;
            ga += da * r;
            gb += db * r;
        }
        let (maa, mbb) = (jaa * (1.0 + lambda), jbb * (1.0 + lambda));
        let det = maa * mbb - jab * jab;
        if det == 0.0 {
            break;
        }
        let step_a = (mbb * ga - jab * gb) / det;
        let step_b = (maa * gb - jab * ga) / det;
        let trial = residual_sum(t, y, a + step_a, b + step_b);
        if trial < cost {
            a += step_a;
            b += step_b;
            let improvement = cost - trial;
            cost = trial;
            lambda *= 0.3;
            if improvement <= 1e-15 * cost.max(1e-300) {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let total: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    Ok(GaussianFit {
        amplitude: a,
        rate: b,
        r_squared: 1.0 - cost / total,
    })
}
