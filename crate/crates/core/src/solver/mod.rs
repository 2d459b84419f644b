//! Coefficients of the multivariate solution `psi~`, its majorant, the
//! `delta` sequence used to compare them, and growth diagnostics.

mod delta;
mod engine;
mod growth;

pub use delta::{delta_from_parts, delta_sequence, DeltaTable, DELTA_DEGREE_LIMIT};
pub use engine::{Coeff, Levels, RecTerm, Recurrence};
pub use growth::{growth_diagnostics, growth_from_log_maxima, quadratic_fit, GrowthReport, GrowthRow};

use std::collections::BTreeMap;

use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::numeric::{abs, QContext};
use crate::reduction::{horner, horner_scale, ReducedEquation};
use crate::series::{project_to_z, GenSeries, MIndexSeries, MultiIndex, MultiIndexSpace};

/// `C_m` together with the constant `nu~` it was computed with.
#[derive(Clone, Debug)]
pub struct MajorantResult {
    pub nu_tilde: Float,
    pub c: MIndexSeries<Float>,
    pub delta: Option<MIndexSeries<Float>>,
}

/// Values `L(q^lambda q^m)` for every `1 <= |m| <= max_degree`, rejecting
/// any that vanish to working precision.
pub fn divisor_table(red: &ReducedEquation, ctx: &QContext, space: &MultiIndexSpace) -> Result<Levels<Complex>> {
    let prec = ctx.precision_bits();
    let thr = ctx.threshold();
    let mut table: Levels<Complex> = vec![vec![ctx.one()]];
    for d in 1..=space.max_degree() {
        let mut level = Vec::with_capacity(space.level(d).len());
        for m in space.level(d) {
            let e = Complex::with_val(prec, red.lambda() + m.weight(red.generators(), prec));
            let xi = ctx.power(&e)?;
            let value = horner(red.l_coeffs(), &xi, prec);
            let size = horner_scale(red.l_coeffs(), &xi, prec);
            let magnitude = abs(&value);
            if magnitude <= Float::with_val(prec, &thr * &size) {
                return Err(Error::SmallDivisor {
                    index: m.to_string(),
                    magnitude: format!("{:.6e}", magnitude.to_f64()),
                });
            }
            level.push(value);
        }
        table.push(level);
    }
    Ok(table)
}

/// `c_m` for `1 <= |m| <= max_degree` on the current rayon pool.
pub fn solve_coefficients(red: &ReducedEquation, ctx: &QContext, max_degree: u32) -> Result<MIndexSeries<Complex>> {
    let prec = ctx.precision_bits();
    let space = MultiIndexSpace::new(red.arity(), max_degree);
    let divisors = divisor_table(red, ctx, &space)?;

    let mut weights: Vec<Levels<Complex>> = Vec::with_capacity(red.order() + 1);
    for j in 0..=red.order() as u32 {
        let mut table: Levels<Complex> = vec![vec![ctx.one()]];
        for d in 1..=max_degree {
            let level = space
                .level(d)
                .iter()
                .map(|m| {
                    let e = Complex::with_val(prec, m.weight(red.generators(), prec) * j);
                    ctx.power(&e)
                })
                .collect::<Result<Vec<_>>>()?;
            table.push(level);
        }
        weights.push(table);
    }

    let terms: Vec<RecTerm<Complex>> = red
        .monomials()
        .iter()
        .map(|m| RecTerm {
            k: m.k.clone(),
            p: m.p.clone(),
            coeff: m.coeff.clone(),
        })
        .collect();
    let rec = Recurrence {
        space: &space,
        terms: &terms,
        weights: &weights,
        divisors: &divisors,
        precision_bits: prec,
    };
    Ok(to_series(&space, rec.solve()))
}

/// Same as [`solve_coefficients`] on a dedicated pool of `threads` workers.
pub fn solve_coefficients_with_threads(
    red: &ReducedEquation,
    ctx: &QContext,
    max_degree: u32,
    threads: usize,
) -> Result<MIndexSeries<Complex>> {
    with_pool(threads, || solve_coefficients(red, ctx, max_degree))
}

/// `nu~` and the coefficients `C_m` of the one-variable-per-generator majorant
/// `nu~ W = sum |A_{k,p}| z^k W^{|p|}`.
pub fn solve_majorant(red: &ReducedEquation, ctx: &QContext, max_degree: u32) -> Result<MajorantResult> {
    let prec = ctx.precision_bits();
    let first = MultiIndexSpace::new(red.arity(), 1);
    let unit_divisors = divisor_table(red, ctx, &first)?;
    let mut nu_tilde = Float::with_val(prec, 1);
    for value in &unit_divisors[1] {
        let m = abs(value);
        if m < nu_tilde {
            nu_tilde = m;
        }
    }

    let space = MultiIndexSpace::new(red.arity(), max_degree);
    // the majorant must not hide a vanishing divisor either
    divisor_table(red, ctx, &space)?;

    let mut merged: BTreeMap<(MultiIndex, u32), Float> = BTreeMap::new();
    for m in red.monomials() {
        *merged
            .entry((m.k.clone(), m.p_degree()))
            .or_insert_with(|| Float::new(prec)) += abs(&m.coeff);
    }
    let terms: Vec<RecTerm<Float>> = merged
        .into_iter()
        .map(|((k, pd), coeff)| RecTerm { k, p: vec![pd], coeff })
        .collect();
    let ones: Levels<Float> = (0..=max_degree)
        .map(|d| vec![Float::with_val(prec, 1); space.level(d).len()])
        .collect();
    let divisors: Levels<Float> = (0..=max_degree)
        .map(|d| vec![nu_tilde.clone(); space.level(d).len()])
        .collect();
    let weights = vec![ones];
    let rec = Recurrence {
        space: &space,
        terms: &terms,
        weights: &weights,
        divisors: &divisors,
        precision_bits: prec,
    };
    Ok(MajorantResult {
        nu_tilde,
        c: to_series(&space, rec.solve()),
        delta: None,
    })
}

/// `phi0 + z^lambda psi~` as a univariate series, truncated where the
/// solved degrees stop determining the coefficients.
pub fn reconstruct(red: &ReducedEquation, psi: &MIndexSeries<Complex>, ctx: &QContext) -> GenSeries {
    let tail = project_to_z(psi, red.generators(), red.lambda(), ctx);
    red.phi0().add(&tail)
}

/// Runs `f` on a fresh rayon pool with the given number of workers.
pub fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?;
    pool.install(f)
}

fn to_series<T: Clone>(space: &MultiIndexSpace, levels: Levels<T>) -> MIndexSeries<T> {
    let mut out = MIndexSeries::new(space.arity(), space.max_degree());
    for (d, level) in levels.into_iter().enumerate().skip(1) {
        for (m, v) in space.level(d as u32).iter().zip(level) {
            out.insert(m.clone(), v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::GenSeries;

    fn linear_one_step(coeff: Complex, ctx: &QContext) -> ReducedEquation {
        // L = xi - 3, generators {1, 2}, a single z^{(1,0)} monomial
        ReducedEquation::from_parts(
            ctx.complex(0.0, 0.0),
            ctx.complex(1.0, 0.0),
            vec![ctx.complex(-3.0, 0.0), ctx.one()],
            vec![ctx.complex(1.0, 0.0), ctx.complex(2.5, 0.0)],
            vec![crate::reduction::Monomial {
                k: MultiIndex::new(vec![1, 0]),
                p: vec![0, 0],
                coeff,
                exponent: ctx.complex(1.0, 0.0),
            }],
            GenSeries::zero(ctx, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn single_pure_monomial_fills_one_coefficient() {
        let ctx = QContext::new(Complex::with_val(192, 2), 192).unwrap();
        let a = ctx.complex(0.5, -1.25);
        let red = linear_one_step(a.clone(), &ctx);
        let c = solve_coefficients(&red, &ctx, 4).unwrap();
        // L(q^lambda q_1) = 2 - 3
        let want = Complex::with_val(192, &a / ctx.complex(-1.0, 0.0));
        for (m, v) in c.iter() {
            if *m == MultiIndex::new(vec![1, 0]) {
                assert!(ctx.approx_eq(v, &want));
            } else {
                assert!(v.real().is_zero() && v.imag().is_zero(), "c_{m} = {v}");
            }
        }
    }

    #[test]
    fn majorant_unit_degree_matches_coefficient_size() {
        let ctx = QContext::new(Complex::with_val(192, 2), 192).unwrap();
        let a = ctx.complex(0.5, -1.25);
        let red = linear_one_step(a.clone(), &ctx);
        let maj = solve_majorant(&red, &ctx, 3).unwrap();
        // nu~ = min(1, |2 - 3|, |2^2.5 - 3|) = 1
        assert_eq!(maj.nu_tilde, 1);
        let c10 = maj.c.get(&MultiIndex::new(vec![1, 0])).unwrap();
        let prod = Float::with_val(192, c10 * &maj.nu_tilde);
        assert!((prod - abs(&a)).abs() < 1e-50);
    }

    #[test]
    fn no_monomials_gives_zero_majorant() {
        let ctx = QContext::new(Complex::with_val(192, 2), 192).unwrap();
        let red = ReducedEquation::from_parts(
            ctx.zero(),
            ctx.one(),
            vec![ctx.complex(-3.0, 0.0), ctx.one()],
            vec![ctx.one()],
            vec![],
            GenSeries::zero(&ctx, 0.0),
        )
        .unwrap();
        let maj = solve_majorant(&red, &ctx, 5).unwrap();
        assert!(maj.c.iter().all(|(_, v)| v.is_zero()));
    }

    #[test]
    fn vanishing_divisor_is_reported() {
        // L = xi - 4 with q = 2 and generator 2: L(q^2) = 0 at m = (1)
        let ctx = QContext::new(Complex::with_val(192, 2), 192).unwrap();
        let red = ReducedEquation::from_parts(
            ctx.zero(),
            ctx.one(),
            vec![ctx.complex(-4.0, 0.0), ctx.one()],
            vec![ctx.complex(2.0, 0.0)],
            vec![crate::reduction::Monomial {
                k: MultiIndex::new(vec![1]),
                p: vec![0, 0],
                coeff: ctx.one(),
                exponent: ctx.complex(2.0, 0.0),
            }],
            GenSeries::zero(&ctx, 0.0),
        )
        .unwrap();
        let err = solve_coefficients(&red, &ctx, 3).unwrap_err();
        assert!(matches!(err, Error::SmallDivisor { ref index, .. } if index.contains('1')));
        assert!(err.is_hypothesis_violation());
    }
}
