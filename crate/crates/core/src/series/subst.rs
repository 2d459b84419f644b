//! Substitution of a generalized series into `F` and the residual it leaves.

use std::collections::HashMap;

use rug::{Complex, Float};

use super::{Cancellation, GenSeries};
use crate::equation::QDiffEquation;
use crate::error::Result;
use crate::numeric::{abs, QContext};

/// `F(z, y, sigma y, ..., sigma^n y)`, truncated at the bound of `y`.
///
/// Cancelled sums are kept, so the output measures how far `y` is from a
/// solution rather than hiding it below the merge threshold.
pub fn substitute(eq: &QDiffEquation, y: &GenSeries, ctx: &QContext) -> Result<GenSeries> {
    evaluate(eq, y, ctx, false)
}

/// The same expansion with every coefficient, dilation factor and
/// coefficient of `F` replaced by its modulus: no cancellation can occur, so
/// each output coefficient bounds the size of the terms that produced it.
pub fn substitute_abs(eq: &QDiffEquation, y: &GenSeries, ctx: &QContext) -> Result<GenSeries> {
    evaluate(eq, y, ctx, true)
}

fn evaluate(eq: &QDiffEquation, y: &GenSeries, ctx: &QContext, absolute: bool) -> Result<GenSeries> {
    let bound = y.truncation_re();
    let mode = Cancellation::Keep;
    let mut dilated = Vec::with_capacity(eq.order() + 1);
    for k in 0..=eq.order() {
        let d = y.dilate(k as u32, ctx)?;
        dilated.push(if absolute { d.abs_coeffs() } else { d });
    }
    let mut powers: HashMap<(usize, u32), GenSeries> = HashMap::new();
    let mut total = GenSeries::zero(ctx, bound);
    for term in eq.terms() {
        let coeff = if absolute {
            Complex::with_val(ctx.precision_bits(), abs(&term.coeff))
        } else {
            term.coeff.clone()
        };
        let mut product = GenSeries::monomial(ctx, term.z_exponent.clone(), coeff, bound);
        for (k, &d) in term.powers.iter().enumerate() {
            if d == 0 {
                continue;
            }
            let factor = powers
                .entry((k, d))
                .or_insert_with(|| dilated[k].pow_with(d, mode));
            product = product.mul_with(factor, mode);
        }
        total = total.add_with(&product, mode);
    }
    Ok(total.with_truncation(bound))
}

/// Residual of a candidate solution on `Re exponent <= bound`.
#[derive(Clone, Debug)]
pub struct Residual {
    pub series: GenSeries,
    pub scale: GenSeries,
    pub bound: f64,
    /// Largest `|coefficient|`.
    pub max_abs: Float,
    /// Largest `|coefficient| / scale` where the scale is the no-cancellation
    /// magnitude of the same exponent.
    pub max_relative: Float,
    pub terms_checked: usize,
}

pub fn residual(eq: &QDiffEquation, y: &GenSeries, ctx: &QContext) -> Result<Residual> {
    let series = substitute(eq, y, ctx)?;
    let scale = substitute_abs(eq, y, ctx)?;
    let bound = y.truncation_re();
    let prec = ctx.precision_bits();
    let mut max_abs = Float::new(prec);
    let mut max_relative = Float::new(prec);
    let mut terms_checked = 0;
    for t in series.terms() {
        if t.exponent.real().to_f64() > bound {
            continue;
        }
        terms_checked += 1;
        let a = abs(&t.coeff);
        let s = scale
            .coeff_at(&t.exponent)
            .map(abs)
            .unwrap_or_else(|| Float::with_val(prec, 1));
        let rel = if s.is_zero() { a.clone() } else { Float::with_val(prec, &a / &s) };
        if a > max_abs {
            max_abs = a;
        }
        if rel > max_relative {
            max_relative = rel;
        }
    }
    Ok(Residual {
        series,
        scale,
        bound,
        max_abs,
        max_relative,
        terms_checked,
    })
}
