//! Empirical growth of a coefficient table: per-degree maxima, their `d`-th
//! roots, and fits of `ln M_d` against `d` and `d^2`.

use rug::{Complex, Float};
use serde::Serialize;

use crate::numeric::abs;
use crate::series::MIndexSeries;

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub degree: u32,
    /// `ln M_d`, `-inf` when the whole level vanishes.
    pub ln_max: f64,
    /// `M_d^{1/d}`.
    pub root_growth: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    /// Least-squares slope of `ln M_d` against `d`.
    pub slope_d: f64,
    /// Coefficient of `d^2` in a least-squares quadratic fit of `ln M_d`.
    pub slope_d2: f64,
    /// Whether the quadratic term dominates the window, i.e. `M_d^{1/d}`
    /// keeps growing instead of levelling off.
    pub super_geometric: bool,
    /// `1 / max M_d^{1/d}` over the upper half of the degrees, when bounded.
    pub radius: Option<f64>,
}

pub fn growth_diagnostics(psi: &MIndexSeries<Complex>) -> GrowthReport {
    let mut points = Vec::new();
    for d in 1..=psi.max_degree() {
        let mut best: Option<Float> = None;
        for (_, c) in psi.of_degree(d) {
            let a = abs(c);
            if best.as_ref().is_none_or(|b| a > *b) {
                best = Some(a);
            }
        }
        if let Some(b) = best {
            let ln = if b.is_zero() { f64::NEG_INFINITY } else { b.ln().to_f64() };
            points.push((d, ln));
        }
    }
    growth_from_log_maxima(&points)
}

/// The same report from precomputed `(d, ln M_d)` pairs.
pub fn growth_from_log_maxima(points: &[(u32, f64)]) -> GrowthReport {
    let rows: Vec<GrowthRow> = points
        .iter()
        .map(|&(degree, ln_max)| GrowthRow {
            degree,
            ln_max,
            root_growth: (ln_max / degree as f64).exp(),
        })
        .collect();
    let finite: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, l)| l.is_finite())
        .map(|&(d, l)| (d as f64, l))
        .collect();
    let slope_d = linear_fit(&finite).map_or(f64::NAN, |(slope, _)| slope);
    let slope_d2 = quadratic_fit(&finite).map_or(f64::NAN, |(a, _, _)| a);
    let d_max = finite.iter().map(|p| p.0).fold(0.0, f64::max);
    let super_geometric = slope_d2.is_finite() && slope_d2 * d_max > std::f64::consts::LN_2;

    let radius = if super_geometric || finite.is_empty() {
        None
    } else {
        let half = d_max / 2.0;
        let peak = rows
            .iter()
            .filter(|r| r.ln_max.is_finite() && r.degree as f64 >= half)
            .map(|r| r.root_growth)
            .fold(0.0, f64::max);
        (peak > 0.0).then(|| 1.0 / peak)
    };

    GrowthReport {
        rows,
        slope_d,
        slope_d2,
        super_geometric,
        radius,
    }
}

fn linear_fit(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let det = n * sxx - sx * sx;
    if det == 0.0 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / det;
    Some((slope, (sy - slope * sx) / n))
}

/// `(a, b, c)` minimising `sum (a x^2 + b x + c - y)^2`.
pub fn quadratic_fit(points: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    if points.len() < 3 {
        return None;
    }
    // normal equations, solved by Gaussian elimination with partial pivoting
    let mut m = [[0.0f64; 4]; 3];
    for &(x, y) in points {
        let basis = [x * x, x, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
            m[i][3] += basis[i] * y;
        }
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col] == 0.0 {
            return None;
        }
        m.swap(col, pivot);
        for row in 0..3 {
            if row != col {
                let f = m[row][col] / m[col][col];
                let pivot_row = m[col];
                for (v, p) in m[row].iter_mut().zip(pivot_row).skip(col) {
                    *v -= f * p;
                }
            }
        }
    }
    Some((m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::MultiIndex;

    #[test]
    fn geometric_table_has_radius_one_half() {
        let mut psi = MIndexSeries::new(1, 20);
        for d in 1..=20u32 {
            psi.insert(MultiIndex::new(vec![d]), Complex::with_val(64, 2f64.powi(d as i32)));
        }
        let r = growth_diagnostics(&psi);
        assert!(!r.super_geometric);
        assert!((r.slope_d - 2f64.ln()).abs() < 1e-9);
        assert!((r.radius.unwrap() - 0.5).abs() < 1e-9);
        assert!(r.rows.iter().all(|row| (row.root_growth - 2.0).abs() < 1e-9));
    }

    #[test]
    fn quadratic_exponent_is_recovered() {
        let points: Vec<(u32, f64)> = (5..=15).map(|d| (d, 1.5 * (d * d) as f64 - 0.3 * d as f64 + 2.0)).collect();
        let r = growth_from_log_maxima(&points);
        assert!(r.super_geometric);
        assert!(r.radius.is_none());
        assert!((r.slope_d2 - 1.5).abs() < 1e-9);
    }

    #[test]
    fn fit_recovers_exact_parabola() {
        let pts: Vec<(f64, f64)> = (0..6).map(|x| (x as f64, 2.0 * (x * x) as f64 - 3.0 * x as f64 + 1.0)).collect();
        let (a, b, c) = quadratic_fit(&pts).unwrap();
        assert!((a - 2.0).abs() < 1e-10 && (b + 3.0).abs() < 1e-10 && (c - 1.0).abs() < 1e-10);
    }
}
