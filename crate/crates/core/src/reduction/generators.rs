//! Minimal generating sets of the exponent semigroup.

use std::cmp::Ordering;

use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::numeric::{abs, fmt_complex, QContext};
use crate::series::{exponent_order, MultiIndex};

/// Largest coefficient tried in a semigroup representation.
pub const COMBINATION_BOUND: u32 = 64;

/// Returns the irreducible elements of `raw` (every other element is a
/// nonnegative combination of them) and the multi-index of each input.
///
/// Scanning in ascending `(Re, Im)` order, an element joins the generating set
/// exactly when the generators found so far cannot express it; since all real
/// parts are positive this yields the unique minimal set. Generators are
/// returned ordered by `Re` ascending, then `Im` descending.
pub fn derive_generators(raw: &[Complex], ctx: &QContext) -> Result<(Vec<Complex>, Vec<MultiIndex>)> {
    for e in raw {
        if !(e.real().is_sign_positive() && !e.real().is_zero()) {
            return Err(Error::Domain(format!(
                "exponent {} does not have positive real part",
                fmt_complex(e, 12)
            )));
        }
    }
    let mut sorted: Vec<Complex> = raw.to_vec();
    sorted.sort_by(exponent_order);
    let mut unique: Vec<Complex> = Vec::new();
    for e in sorted {
        if !unique.iter().any(|u| close(u, &e, ctx)) {
            unique.push(e);
        }
    }
    let mut generators: Vec<Complex> = Vec::new();
    for e in &unique {
        if represent(e, &generators, ctx).is_none() {
            generators.push(e.clone());
        }
    }
    generators.sort_by(generator_order);
    let mut map = Vec::with_capacity(raw.len());
    for e in raw {
        let m = represent(e, &generators, ctx).ok_or_else(|| Error::NotRepresentable {
            exponent: fmt_complex(e, 12),
            bound: COMBINATION_BOUND,
        })?;
        map.push(m);
    }
    Ok((generators, map))
}

/// `Re` ascending, then `Im` descending.
pub fn generator_order(a: &Complex, b: &Complex) -> Ordering {
    a.real()
        .partial_cmp(b.real())
        .unwrap_or(Ordering::Equal)
        .then_with(|| b.imag().partial_cmp(a.imag()).unwrap_or(Ordering::Equal))
}

/// Nonnegative coefficients (each at most [`COMBINATION_BOUND`]) expressing
/// `target` over `generators`, lexicographically smallest first.
pub fn represent(target: &Complex, generators: &[Complex], ctx: &QContext) -> Option<MultiIndex> {
    let mut coeffs = vec![0u32; generators.len()];
    if search(target, generators, 0, &mut coeffs, ctx) {
        Some(MultiIndex::new(coeffs))
    } else {
        None
    }
}

fn search(rest: &Complex, generators: &[Complex], i: usize, coeffs: &mut [u32], ctx: &QContext) -> bool {
    let prec = ctx.precision_bits();
    if i == generators.len() {
        return abs(rest) <= tolerance(rest, ctx);
    }
    let slack = Float::with_val(prec, 1e-20);
    for c in 0..=COMBINATION_BOUND {
        let used = Complex::with_val(prec, &generators[i] * c);
        let next = Complex::with_val(prec, rest - &used);
        if Float::with_val(prec, next.real() + &slack).is_sign_negative() {
            break;
        }
        coeffs[i] = c;
        if search(&next, generators, i + 1, coeffs, ctx) {
            return true;
        }
    }
    coeffs[i] = 0;
    false
}

fn tolerance(scale: &Complex, ctx: &QContext) -> Float {
    let mut s = abs(scale);
    if s < 1 {
        s = Float::with_val(ctx.precision_bits(), 1);
    }
    // combinations of up to 64 copies accumulate rounding
    Float::with_val(ctx.precision_bits(), ctx.threshold() * 1024u32) * s
}

fn close(a: &Complex, b: &Complex, ctx: &QContext) -> bool {
    let d = Complex::with_val(ctx.precision_bits(), a - b);
    abs(&d) <= tolerance(a, ctx)
}
