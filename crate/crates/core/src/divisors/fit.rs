//! Empirical `(c, nu)` envelopes `distance >= c |m|^{-nu}`.
//!
//! Only the lower convex hull of the points `(ln |m|, ln distance)` matters.
//! The exponent is the steepest descent among hull edges ending in the upper
//! half of the sampled `ln |m|` range, so that a few large early distances do
//! not dictate it; `c` is then the largest constant valid on every sample.

use rug::Float;
use serde::Serialize;

use crate::error::{Error, Result};

pub const MIN_FIT_SAMPLES: usize = 10;

/// Exponents above this are reported as a suspected violation.
pub const DEFAULT_NU_CAP: f64 = 2.5;

#[derive(Clone, Debug, Serialize)]
pub struct DiophantineFit {
    pub c: f64,
    pub ln_c: f64,
    pub nu: f64,
    pub samples: usize,
    pub max_degree: u64,
    /// `nu` refitted on the samples with `|m| <= max_degree / 4` and `/ 2`.
    pub nu_history: Vec<(u64, f64)>,
    pub nu_cap: f64,
    pub suspected_violation: bool,
}

/// Fits the envelope to `(|m|, distance)` samples.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // a NaN must land on the failing side
pub fn fit_diophantine(points: &[(u64, Float)], nu_cap: f64) -> Result<DiophantineFit> {
    if points.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_FIT_SAMPLES,
            got: points.len(),
        });
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|(d, v)| {
            let ln = if v.is_zero() { f64::NEG_INFINITY } else { v.clone().ln().to_f64() };
            ((*d as f64).ln(), ln)
        })
        .collect();
    let max_degree = points.iter().map(|p| p.0).max().unwrap_or(1);
    let (nu, ln_c) = fit_points(&logs);
    let mut nu_history = Vec::new();
    for div in [4u64, 2] {
        let bound = max_degree / div;
        let part: Vec<(f64, f64)> = points
            .iter()
            .zip(&logs)
            .filter(|((d, _), _)| *d <= bound)
            .map(|(_, l)| *l)
            .collect();
        if part.len() >= 2 {
            nu_history.push((bound, fit_points(&part).0));
        }
    }
    nu_history.push((max_degree, nu));
    Ok(DiophantineFit {
        c: ln_c.exp(),
        ln_c,
        nu,
        samples: points.len(),
        max_degree,
        nu_history,
        nu_cap,
        suspected_violation: !(nu <= nu_cap),
    })
}

/// `(nu, ln c)` for points `(ln |m|, ln distance)`.
pub fn fit_points(logs: &[(f64, f64)]) -> (f64, f64) {
    if logs.iter().any(|p| p.1 == f64::NEG_INFINITY) {
        return (f64::INFINITY, f64::NEG_INFINITY);
    }
    // keep the lowest value per abscissa, then build the lower hull
    let mut pts: Vec<(f64, f64)> = logs.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup_by(|later, kept| later.0 == kept.0);
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b when it lies on or above the segment a-p
            if (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let x_max = hull.last().map_or(0.0, |p| p.0);
    let x_min = hull.first().map_or(0.0, |p| p.0);
    let half = 0.5 * (x_min + x_max);
    let slopes: Vec<f64> = hull
        .windows(2)
        .filter(|w| w[1].0 >= half)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .collect();
    let nu = slopes.iter().fold(0.0f64, |acc, s| acc.max(-s));
    let ln_c = logs
        .iter()
        .map(|(x, y)| y + nu * x)
        .fold(f64::INFINITY, f64::min);
    (nu, ln_c)
}

/// Smallest `nu' >= nu` with `value >= (2 |m|)^{-nu'}` on every sample, the
/// form taken by the multiplicative conditions.
pub fn multiplicative_exponent(points: &[(u64, Float)], nu: f64) -> f64 {
    points.iter().fold(nu, |acc, (d, v)| {
        if v.is_zero() {
            return f64::INFINITY;
        }
        let need = -v.clone().ln().to_f64() / (2.0 * *d as f64).ln();
        acc.max(need)
    })
}
