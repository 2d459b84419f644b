//! Continued fractions, convergents and the Brjuno / Siegel diagnostics.

use std::collections::HashMap;

use rug::{Complex, Float, Integer};
use serde::Serialize;

use crate::equation::parse_constant;
use crate::error::{Error, Result};
use crate::numeric::QContext;

#[derive(Clone, Debug)]
pub struct CFExpansion {
    /// `omega` to 40 significant digits.
    pub omega: String,
    /// `a_0, a_1, ...`
    pub quotients: Vec<Integer>,
    /// `(p_k, q_k)` for every quotient.
    pub convergents: Vec<(Integer, Integer)>,
    /// The expansion terminated: `omega` is rational at working precision.
    pub rational: bool,
    pub precision_bits: u32,
}

impl CFExpansion {
    pub fn depth(&self) -> usize {
        self.quotients.len()
    }

    pub fn to_json(&self) -> CFExpansionJson {
        CFExpansionJson {
            omega: self.omega.clone(),
            depth: self.depth(),
            quotients: self.quotients.iter().map(Integer::to_string).collect(),
            convergents: self
                .convergents
                .iter()
                .map(|(p, q)| (p.to_string(), q.to_string()))
                .collect(),
            rational: self.rational,
            precision_bits: self.precision_bits,
        }
    }
}

/// Integers as decimal strings, since they outgrow 64 bits quickly.
#[derive(Clone, Debug, Serialize)]
pub struct CFExpansionJson {
    pub omega: String,
    pub depth: usize,
    pub quotients: Vec<String>,
    pub convergents: Vec<(String, String)>,
    pub rational: bool,
    pub precision_bits: u32,
}

/// Expands the constant expression `omega` (same grammar as equation
/// constants, e.g. `sqrt(2) - 1` or `ell`) to `depth` quotients.
pub fn cf_expand(omega: &str, depth: usize, precision_bits: u32) -> Result<CFExpansion> {
    let eval = |prec: u32| -> Result<Float> {
        let ctx = QContext::new(Complex::with_val(prec, 2), prec)?;
        let v = parse_constant(omega, &ctx, &HashMap::new())?;
        if !v.imag().is_zero() {
            return Err(Error::Domain(format!("omega = {omega} is not real")));
        }
        Ok(v.real().clone())
    };
    cf_expand_with(eval, depth, precision_bits)
}

/// Expands a value produced by `eval(precision)`. The quotients are computed at
/// `precision_bits` and again at twice that; only the agreeing prefix is kept,
/// and falling short of `depth` is reported with the precision it would take.
pub fn cf_expand_with(eval: impl Fn(u32) -> Result<Float>, depth: usize, precision_bits: u32) -> Result<CFExpansion> {
    let omega = eval(precision_bits)?;
    let (a, rational_a) = quotients(&omega, depth);
    let (b, rational_b) = quotients(&eval(precision_bits * 2)?, depth);
    let agree = a.iter().zip(&b).take_while(|(x, y)| x == y).count();
    let rational = rational_a && rational_b && a == b;
    if agree < depth && !rational {
        let convergents = convergents(&b[..b.len().min(depth)]);
        let q = convergents.last().map(|c| c.1.clone()).unwrap_or_else(|| Integer::from(1));
        let bits_needed = 2 * q.significant_bits() + 64;
        return Err(Error::PrecisionExhausted {
            depth: agree,
            bits_needed: bits_needed.max(precision_bits * 2),
        });
    }
    let quotients: Vec<Integer> = a.into_iter().take(depth).collect();
    Ok(CFExpansion {
        omega: omega.to_string_radix(10, Some(40)),
        convergents: convergents(&quotients),
        quotients,
        rational,
        precision_bits,
    })
}

fn quotients(omega: &Float, depth: usize) -> (Vec<Integer>, bool) {
    let prec = omega.prec();
    let mut x = omega.clone();
    let mut out = Vec::with_capacity(depth);
    for _ in 0..depth {
        let a = Float::with_val(prec, x.floor_ref());
        let mut a_int = a.to_integer().expect("finite quotient");
        let frac = Float::with_val(prec, &x - &a);
        // rounding keeps a terminated expansion from hitting exact zero, and
        // may leave it just below the next integer instead
        let scale = Float::with_val(prec, x.abs_ref()).max(&Float::with_val(prec, 1));
        let tiny = Float::with_val(prec, Float::i_exp(1, -((prec / 2) as i32))) * scale;
        if frac <= tiny || Float::with_val(prec, 1 - &frac) <= tiny {
            if frac > tiny {
                a_int += 1;
            }
            out.push(a_int);
            return (out, true);
        }
        out.push(a_int);
        x = Float::with_val(prec, frac.recip_ref());
    }
    (out, false)
}

fn convergents(quotients: &[Integer]) -> Vec<(Integer, Integer)> {
    // (p_{k-2}, q_{k-2}) and (p_{k-1}, q_{k-1}), seeded with the k = -2, -1 values
    let (mut p2, mut q2) = (Integer::from(0), Integer::from(1));
    let (mut p1, mut q1) = (Integer::from(1), Integer::from(0));
    let mut out = Vec::with_capacity(quotients.len());
    for a in quotients {
        let p = Integer::from(a * &p1) + &p2;
        let q = Integer::from(a * &q1) + &q2;
        out.push((p.clone(), q.clone()));
        p2 = std::mem::replace(&mut p1, p);
        q2 = std::mem::replace(&mut q1, q);
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct BrjunoReport {
    /// `S_K = sum_{k <= K} ln q_{k+1} / q_k`.
    pub partial_sums: Vec<f64>,
    /// `S_K - S_{K-1}`.
    pub cauchy_differences: Vec<f64>,
    /// `ln q_{k+1} / ln q_k`, absent while `q_k = 1`.
    pub ratios: Vec<Option<f64>>,
    pub max_ratio: f64,
    pub rational: bool,
}

/// Brjuno partial sums and Siegel ratios over the available convergents.
pub fn bruno_siegel(cf: &CFExpansion) -> Result<BrjunoReport> {
    let qs: Vec<&Integer> = cf.convergents.iter().map(|c| &c.1).collect();
    if qs.len() < 3 && !cf.rational {
        return Err(Error::TooFewSamples {
            needed: 3,
            got: qs.len(),
        });
    }
    let ln = |q: &Integer| Float::with_val(128, q).ln().to_f64();
    let mut partial_sums = Vec::new();
    let mut cauchy_differences = Vec::new();
    let mut ratios = Vec::new();
    let mut sum = 0.0;
    for k in 0..qs.len().saturating_sub(1) {
        let term = ln(qs[k + 1]) / Float::with_val(128, qs[k]).to_f64();
        sum += term;
        partial_sums.push(sum);
        cauchy_differences.push(term);
        let lk = ln(qs[k]);
        ratios.push((lk > 0.0).then(|| ln(qs[k + 1]) / lk));
    }
    let max_ratio = ratios.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
    Ok(BrjunoReport {
        partial_sums,
        cauchy_differences,
        ratios,
        max_ratio,
        rational: cf.rational,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn determinant_holds(cf: &CFExpansion) {
        for k in 1..cf.convergents.len() {
            let (p, q) = &cf.convergents[k];
            let (pp, qp) = &cf.convergents[k - 1];
            let det = Integer::from(p * qp) - Integer::from(pp * q);
            let want = if k % 2 == 1 { 1 } else { -1 };
            assert_eq!(det, want, "k = {k}");
        }
    }

    #[test]
    fn golden_ratio_gives_fibonacci() {
        let cf = cf_expand("(sqrt(5) - 1)/2", 31, 256).unwrap();
        assert_eq!(cf.quotients[0], 0);
        assert!(cf.quotients[1..].iter().all(|a| *a == 1));
        let (mut a, mut b) = (Integer::from(1), Integer::from(1));
        for (_, q) in &cf.convergents {
            assert_eq!(*q, a);
            let next = Integer::from(&a + &b);
            a = b;
            b = next;
        }
        determinant_holds(&cf);
        let report = bruno_siegel(&cf).unwrap();
        assert!(report.max_ratio < 2.0);
    }

    #[test]
    fn silver_ratio_quotients_are_two() {
        let cf = cf_expand("sqrt(2) - 1", 40, 256).unwrap();
        assert!(cf.quotients[1..].iter().all(|a| *a == 2));
        determinant_holds(&cf);
        let r = bruno_siegel(&cf).unwrap();
        assert!(r.cauchy_differences.last().unwrap() < &1e-12);
    }

    #[test]
    fn rational_input_terminates() {
        let cf = cf_expand("7/16", 10, 128).unwrap();
        assert!(cf.rational);
        assert_eq!(cf.quotients, vec![0, 2, 3, 2]);
        let r = bruno_siegel(&cf).unwrap();
        assert!(r.rational && r.partial_sums.len() == 3);
    }

    #[test]
    fn liouville_constant_has_huge_quotients() {
        let cf = cf_expand("ell", 8, 2048).unwrap();
        determinant_holds(&cf);
        let big = cf.quotients.iter().filter(|a| a.significant_bits() > 30).count();
        assert!(big >= 1, "{:?}", cf.quotients);
    }

    #[test]
    fn precision_exhaustion_is_reported() {
        let err = cf_expand("sqrt(2) - 1", 200, 64).unwrap_err();
        match err {
            Error::PrecisionExhausted { depth, bits_needed } => {
                assert!(depth < 200 && bits_needed > 128);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
