//! Roots of the characteristic polynomial `L(xi) = sum A_k xi^k`.
//!
//! Simultaneous Aberth iteration at the context precision, followed by
//! clustering: approximations closer than `2^(-precision/4)` are treated as
//! one multiple root located at their centroid.

use rug::float::Constant;
use rug::{Complex, Float};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{abs, ComplexJson, QContext};

const MAX_ITERATIONS: usize = 2000;

#[derive(Clone, Debug)]
pub struct Root {
    pub value: Complex,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RootJson {
    pub value: ComplexJson,
    pub multiplicity: usize,
}

impl Root {
    pub fn to_json(&self) -> RootJson {
        RootJson {
            value: ComplexJson::from_complex(&self.value),
            multiplicity: self.multiplicity,
        }
    }
}

/// Index of the highest coefficient above the comparison threshold
/// (relative to the largest coefficient), or `None` for the zero polynomial.
pub fn effective_degree(coeffs: &[Complex], ctx: &QContext) -> Option<usize> {
    let scale = max_abs(coeffs, ctx.precision_bits());
    if scale.is_zero() {
        return None;
    }
    coeffs.iter().rposition(|c| !ctx.is_negligible(c, &scale))
}

/// `p(x)` by Horner's rule.
pub fn horner(coeffs: &[Complex], x: &Complex, prec: u32) -> Complex {
    let mut acc = Complex::new(prec);
    for c in coeffs.iter().rev() {
        acc *= x;
        acc += c;
    }
    acc
}

/// `sum |a_k| |x|^k`, the size of the terms Horner's rule combines.
pub fn horner_scale(coeffs: &[Complex], x: &Complex, prec: u32) -> Float {
    let r = abs(x);
    let mut acc = Float::new(prec);
    for c in coeffs.iter().rev() {
        acc *= &r;
        acc += abs(c);
    }
    acc
}

pub fn polynomial_roots(coeffs: &[Complex], ctx: &QContext) -> Result<Vec<Root>> {
    let prec = ctx.precision_bits();
    let degree = effective_degree(coeffs, ctx)
        .ok_or_else(|| Error::Domain("L is identically zero".into()))?;
    let scale = max_abs(coeffs, prec);
    let zeros = coeffs[..degree]
        .iter()
        .take_while(|c| ctx.is_negligible(c, &scale))
        .count();
    let reduced: Vec<Complex> = coeffs[zeros..=degree].to_vec();
    let mut roots = Vec::new();
    if zeros > 0 {
        roots.push(Root {
            value: Complex::new(prec),
            multiplicity: zeros,
        });
    }
    if reduced.len() > 1 {
        let approx = aberth(&reduced, ctx)?;
        roots.extend(cluster(approx, ctx));
    }
    Ok(roots)
}

fn aberth(coeffs: &[Complex], ctx: &QContext) -> Result<Vec<Complex>> {
    let prec = ctx.precision_bits();
    let d = coeffs.len() - 1;
    let lead = &coeffs[d];
    if d == 1 {
        let r = -Complex::with_val(prec, &coeffs[0] / lead);
        return Ok(vec![r]);
    }
    let derivative: Vec<Complex> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| Complex::with_val(prec, c * k as u32))
        .collect();

    // start on a circle of the geometric-mean radius, rotated off the axes
    let ratio = Float::with_val(prec, abs(&coeffs[0]) / abs(lead));
    let radius = Float::with_val(prec, ratio.ln() / d as u32).exp();
    let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
    let mut z: Vec<Complex> = (0..d)
        .map(|i| {
            let angle = Float::with_val(prec, &two_pi * i as u32) / d as u32 + 0.4;
            let unit = Complex::with_val(prec, (Float::new(prec), angle)).exp();
            Complex::with_val(prec, unit * &radius)
        })
        .collect();

    let rounding = Float::with_val(prec, ctx.threshold() * 64u32);
    for _ in 0..MAX_ITERATIONS {
        let mut done = true;
        let snapshot = z.clone();
        for i in 0..d {
            let p = horner(coeffs, &snapshot[i], prec);
            let size = horner_scale(coeffs, &snapshot[i], prec);
            if abs(&p) <= Float::with_val(prec, &rounding * &size) {
                continue;
            }
            done = false;
            let dp = horner(&derivative, &snapshot[i], prec);
            if dp.real().is_zero() && dp.imag().is_zero() {
                continue;
            }
            let w = Complex::with_val(prec, &p / &dp);
            let mut repulsion = Complex::new(prec);
            for (j, zj) in snapshot.iter().enumerate() {
                if j != i {
                    let diff = Complex::with_val(prec, &snapshot[i] - zj);
                    repulsion += Complex::with_val(prec, diff.recip_ref());
                }
            }
            let denom = Complex::with_val(prec, 1 - Complex::with_val(prec, &w * &repulsion));
            let step = Complex::with_val(prec, &w / &denom);
            z[i] = Complex::with_val(prec, &snapshot[i] - &step);
        }
        if done {
            return Ok(z);
        }
    }
    Err(Error::RootsNotConverged {
        iterations: MAX_ITERATIONS,
        partial: z,
    })
}

fn cluster(approx: Vec<Complex>, ctx: &QContext) -> Vec<Root> {
    let prec = ctx.precision_bits();
    let radius = Float::with_val(prec, Float::i_exp(1, -((prec / 4) as i32)));
    let mut groups: Vec<Vec<Complex>> = Vec::new();
    for z in approx {
        let scale = abs(&z).max(&Float::with_val(prec, 1));
        let tol = Float::with_val(prec, &radius * &scale);
        match groups
            .iter_mut()
            .find(|g| g.iter().any(|w| abs(&Complex::with_val(prec, &z - w)) <= tol))
        {
            Some(g) => g.push(z),
            None => groups.push(vec![z]),
        }
    }
    let mut roots: Vec<Root> = groups
        .into_iter()
        .map(|g| {
            let n = g.len();
            let mut sum = Complex::new(prec);
            for z in &g {
                sum += z;
            }
            Root {
                value: Complex::with_val(prec, sum / n as u32),
                multiplicity: n,
            }
        })
        .collect();
    roots.sort_by(|a, b| {
        abs(&a.value)
            .partial_cmp(&abs(&b.value))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.value.imag().partial_cmp(b.value.imag()).unwrap_or(std::cmp::Ordering::Equal))
    });
    roots
}

fn max_abs(coeffs: &[Complex], prec: u32) -> Float {
    coeffs
        .iter()
        .map(abs)
        .fold(Float::new(prec), |m, a| if a > m { a } else { m })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_residuals(coeffs: &[Complex], roots: &[Root], ctx: &QContext) {
        let prec = ctx.precision_bits();
        let bound = Float::with_val(prec, Float::i_exp(1, -((prec / 2) as i32)));
        for r in roots {
            let v = abs(&horner(coeffs, &r.value, prec));
            let s = horner_scale(coeffs, &r.value, prec);
            assert!(v <= Float::with_val(prec, &bound * &s), "residual {v} at {}", r.value);
        }
    }

    fn mul_linear(poly: &[Complex], root: &Complex, prec: u32) -> Vec<Complex> {
        // poly * (xi - root)
        let mut out = vec![Complex::new(prec); poly.len() + 1];
        for (k, c) in poly.iter().enumerate() {
            out[k + 1] += c;
            out[k] -= Complex::with_val(prec, c * root);
        }
        out
    }

    #[test]
    fn zero_root_and_simple_root() {
        let ctx = QContext::new(Complex::with_val(192, (0.3, 0.8)), 192).unwrap();
        let qi = ctx.power(&ctx.complex(0.0, 1.0)).unwrap();
        // xi (xi - q^i)
        let coeffs = vec![ctx.zero(), -qi.clone(), ctx.one()];
        let roots = polynomial_roots(&coeffs, &ctx).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots[0].value.real().is_zero() && roots[0].multiplicity == 1);
        assert!(ctx.approx_eq(&roots[1].value, &qi));
        check_residuals(&coeffs, &roots, &ctx);
    }

    #[test]
    fn double_root_is_clustered() {
        let ctx = QContext::new(Complex::with_val(192, (0.3, 0.8)), 192).unwrap();
        let a = ctx.complex(0.7, -0.4);
        let c00 = ctx.complex(1.5, 0.0);
        let coeffs = mul_linear(&mul_linear(&[c00], &a, 192), &a, 192);
        let roots = polynomial_roots(&coeffs, &ctx).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].multiplicity, 2);
        let err = abs(&Complex::with_val(192, &roots[0].value - &a));
        assert!(err < Float::with_val(192, Float::i_exp(1, -80)));
        check_residuals(&coeffs, &roots, &ctx);
    }

    #[test]
    fn three_simple_roots() {
        let ctx = QContext::new(Complex::with_val(512, (0, 1)), 512).unwrap();
        let targets = [ctx.complex(2.0, 0.0), ctx.complex(0.77, 0.64), ctx.complex(0.0, 0.2079)];
        let mut coeffs = vec![ctx.one()];
        for t in &targets {
            coeffs = mul_linear(&coeffs, t, 512);
        }
        let roots = polynomial_roots(&coeffs, &ctx).unwrap();
        assert_eq!(roots.len(), 3);
        for t in &targets {
            assert!(roots.iter().any(|r| ctx.approx_eq(&r.value, t)));
        }
        check_residuals(&coeffs, &roots, &ctx);
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        let ctx = QContext::new(Complex::with_val(64, 2), 64).unwrap();
        assert!(polynomial_roots(&[ctx.zero(), ctx.zero()], &ctx).is_err());
    }
}
