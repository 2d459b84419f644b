//! The three worked examples and a small synthetic instance, ready to use.
//!
//! * `ex1`: `sigma^2 y - q^i sigma y + q^{2i} z (1 + y^2) = 0` with
//!   `q = exp(-(sqrt2/2) pi (1 - i))`, `phi0 = c00 z^i`, `lambda = i`;
//! * `ex2`: `y sigma^2 y - (sigma y)^2 - z^2 y^4 - z^2 = 0` with
//!   `q = exp(2 pi i omega)`, `phi0 = c00 z^r`, `lambda = r`;
//! * `ex3`: `L(sigma) y - z^7 y^2 - z^2 = 0`, `q = i`,
//!   `L = (xi - 2)(xi - i^{4 ell})(xi - i^{1+i})` with the Liouville constant
//!   `ell`. Only its divisor data is provided, it is not reduced.

use std::collections::HashMap;

use rug::float::Constant;
use rug::{Complex, Float};

use crate::equation::{EqTerm, QDiffEquation};
use crate::error::{Error, Result};
use crate::numeric::{liouville_constant, QContext};
use crate::reduction::{reduce, ReducedEquation};
use crate::series::GenSeries;

pub const EX1_EQUATION: &str = "sigma^2[y] - q^(I)*sigma[y] + q^(2*I)*z*(1 + y^2) = 0";
pub const EX2_EQUATION: &str = "y*sigma^2[y] - sigma[y]^2 - z^2*y^4 - z^2 = 0";
pub const SYNTHETIC_EQUATION: &str = "sigma[y] - 3*y - z - y^2 = 0";

/// Equation, initial part and `lambda` of a reducible example.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub text: String,
    pub equation: QDiffEquation,
    pub ctx: QContext,
    pub phi0: GenSeries,
    pub lambda: Complex,
}

impl Fixture {
    pub fn reduce(&self) -> Result<ReducedEquation> {
        reduce(&self.equation, &self.phi0, &self.lambda, &self.ctx)
    }
}

/// `q = exp(-(sqrt2/2) pi (1 - i))`.
pub fn ex1_q(prec: u32) -> Complex {
    let h = Float::with_val(prec, Float::with_val(prec, 2).sqrt() / 2u32) * Float::with_val(prec, Constant::Pi);
    Complex::with_val(prec, (-h.clone(), h)).exp()
}

pub fn ex1(c00: &Complex, prec: u32) -> Result<Fixture> {
    let ctx = QContext::new(ex1_q(prec), prec)?;
    let equation = QDiffEquation::parse(EX1_EQUATION, &ctx, &HashMap::new())?;
    let lambda = ctx.complex(0.0, 1.0);
    let phi0 = GenSeries::monomial(&ctx, lambda.clone(), Complex::with_val(prec, c00), f64::INFINITY);
    Ok(Fixture {
        name: "ex1",
        text: EX1_EQUATION.to_string(),
        equation,
        ctx,
        phi0,
        lambda,
    })
}

/// `q = exp(2 pi i omega)` with `phi0 = c00 z^r`.
pub fn ex2(omega: &Float, r: &Complex, c00: &Complex, prec: u32) -> Result<Fixture> {
    let two_pi_omega = Float::with_val(prec, Constant::Pi) * 2u32 * Float::with_val(prec, omega);
    let q = Complex::with_val(prec, (Float::new(prec), two_pi_omega)).exp();
    let ctx = QContext::new(q, prec)?;
    let equation = QDiffEquation::parse(EX2_EQUATION, &ctx, &HashMap::new())?;
    let lambda = Complex::with_val(prec, r);
    let phi0 = GenSeries::monomial(&ctx, lambda.clone(), Complex::with_val(prec, c00), f64::INFINITY);
    Ok(Fixture {
        name: "ex2",
        text: EX2_EQUATION.to_string(),
        equation,
        ctx,
        phi0,
        lambda,
    })
}

/// The default parameters `omega = sqrt2 - 1`, `r = 0.3 + 0.2i`, `c00 = 1`.
pub fn ex2_default(prec: u32) -> Result<Fixture> {
    let omega = Float::with_val(prec, Float::with_val(prec, 2).sqrt() - 1u32);
    let r = Complex::with_val(prec, (Float::with_val(prec, 3) / 10u32, Float::with_val(prec, 2) / 10u32));
    ex2(&omega, &r, &Complex::with_val(prec, 1), prec)
}

/// `sigma y - 3y - z - y^2 = 0`, `q = 2`, `phi0 = -z`: reduces to `L = xi - 3`
/// with the single generator 1, so every generator lies outside the unit circle.
pub fn synthetic(prec: u32) -> Result<Fixture> {
    let ctx = QContext::new(Complex::with_val(prec, 2), prec)?;
    let equation = QDiffEquation::parse(SYNTHETIC_EQUATION, &ctx, &HashMap::new())?;
    let lambda = ctx.one();
    let phi0 = GenSeries::monomial(&ctx, ctx.one(), ctx.complex(-1.0, 0.0), f64::INFINITY);
    Ok(Fixture {
        name: "synthetic",
        text: SYNTHETIC_EQUATION.to_string(),
        equation,
        ctx,
        phi0,
        lambda,
    })
}

/// Divisor data of the third example.
#[derive(Clone, Debug)]
pub struct Ex3 {
    pub ctx: QContext,
    pub ell: Float,
    pub equation: QDiffEquation,
    /// `A_0..A_3` of `L`.
    pub l_coeffs: Vec<Complex>,
    /// `2, i^{4 ell}, i^{1+i}`.
    pub roots: Vec<Complex>,
    /// `1, 4 ell, 1 + i`.
    pub generators: Vec<Complex>,
    pub lambda: Complex,
}

pub fn ex3(prec: u32) -> Result<Ex3> {
    let ctx = QContext::new(Complex::with_val(prec, (0, 1)), prec)?;
    let ell = liouville_constant(prec);
    let four_ell = Complex::with_val(prec, Float::with_val(prec, &ell * 4u32));
    let one_plus_i = ctx.complex(1.0, 1.0);
    let roots = vec![ctx.complex(2.0, 0.0), ctx.power(&four_ell)?, ctx.power(&one_plus_i)?];

    let mut l_coeffs = vec![ctx.one()];
    for a in &roots {
        // multiply by (xi - a)
        let mut next = vec![ctx.zero(); l_coeffs.len() + 1];
        for (k, c) in l_coeffs.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= Complex::with_val(prec, c * a);
        }
        l_coeffs = next;
    }

    let mut terms: Vec<EqTerm> = l_coeffs
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let mut powers = vec![0; 4];
            powers[k] = 1;
            EqTerm {
                z_exponent: ctx.zero(),
                powers,
                coeff: a.clone(),
            }
        })
        .collect();
    terms.push(EqTerm {
        z_exponent: ctx.complex(7.0, 0.0),
        powers: vec![2, 0, 0, 0],
        coeff: ctx.complex(-1.0, 0.0),
    });
    terms.push(EqTerm {
        z_exponent: ctx.complex(2.0, 0.0),
        powers: vec![0, 0, 0, 0],
        coeff: ctx.complex(-1.0, 0.0),
    });
    let equation = QDiffEquation::new(3, terms)?;

    Ok(Ex3 {
        generators: vec![ctx.one(), four_ell, one_plus_i],
        lambda: ctx.zero(),
        ctx,
        ell,
        equation,
        l_coeffs,
        roots,
    })
}

/// Looks an example up by name with its default parameters.
pub fn by_name(name: &str, prec: u32) -> Result<Fixture> {
    match name {
        "ex1" => ex1(&Complex::with_val(prec, 0.5), prec),
        "ex2" => ex2_default(prec),
        "synthetic" => synthetic(prec),
        other => Err(Error::UnknownExample(other.to_string())),
    }
}

/// `e^{-sqrt2 pi m}(1 - e^{-sqrt2 pi m})`, the divisor of the `(m, 0)` subseries.
fn ex1_divisor(m: u32, prec: u32) -> Float {
    let rate = Float::with_val(prec, Float::with_val(prec, 2).sqrt() * Float::with_val(prec, Constant::Pi));
    let e = Float::with_val(prec, -(rate * m)).exp();
    Float::with_val(prec, &e * Float::with_val(prec, 1 - &e))
}

/// `c_{0,0}, c_{1,0}, ..., c_{max_m,0}` from the closed recurrence of the
/// `z^{m(1+i)}` subseries.
pub fn ex1_subseries(c00: &Complex, max_m: u32, prec: u32) -> Vec<Complex> {
    let mut c = vec![Complex::with_val(prec, c00)];
    for m in 1..=max_m {
        let mut num = if m == 1 {
            Complex::with_val(prec, c00.square_ref())
        } else {
            Complex::with_val(prec, &c[m as usize - 1] * c00) * 2u32
        };
        for j in 1..m.saturating_sub(1) {
            num += Complex::with_val(prec, &c[j as usize] * &c[(m - 1 - j) as usize]);
        }
        c.push(Complex::with_val(prec, num / ex1_divisor(m, prec)));
    }
    c
}

/// `ln c_{m,0}` for `m = 0..=max_m` and positive real `c00`, evaluated
/// entirely in the log domain (sums by log-sum-exp).
pub fn ex1_subseries_logs(c00: &Float, max_m: u32, prec: u32) -> Vec<Float> {
    assert!(*c00 > 0, "log-domain recurrence needs c00 > 0");
    let ln_c00 = Float::with_val(prec, c00.ln_ref());
    let ln2 = Float::with_val(prec, Constant::Log2);
    let mut logs = vec![ln_c00.clone()];
    for m in 1..=max_m {
        let mut parts: Vec<Float> = Vec::new();
        if m == 1 {
            parts.push(Float::with_val(prec, &ln_c00 * 2u32));
        } else {
            parts.push(Float::with_val(prec, &ln2 + &ln_c00) + &logs[m as usize - 1]);
            for j in 1..m - 1 {
                parts.push(Float::with_val(prec, &logs[j as usize] + &logs[(m - 1 - j) as usize]));
            }
        }
        let top = parts.iter().fold(Float::with_val(prec, f64::NEG_INFINITY), |a, b| a.max(b));
        let mut sum = Float::new(prec);
        for p in &parts {
            sum += Float::with_val(prec, p - &top).exp();
        }
        let ln_num = top + sum.ln();
        logs.push(ln_num - ex1_divisor(m, prec).ln());
    }
    logs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::abs;
    use crate::reduction::classify_case;

    #[test]
    fn ex1_reduces_to_the_expected_data() {
        let fx = ex1(&Complex::with_val(192, 0.5), 192).unwrap();
        let red = fx.reduce().unwrap();
        let ctx = &fx.ctx;
        let qi = ctx.power(&ctx.complex(0.0, 1.0)).unwrap();
        assert_eq!(red.order(), 2);
        assert!(ctx.approx_eq(&red.l_coeffs()[1], &Complex::with_val(192, -&qi)));
        assert!(ctx.approx_eq(&red.l_coeffs()[2], &ctx.one()));
        assert!(abs(&red.l_coeffs()[0]) < 1e-40);
        assert_eq!(red.generators(), &[ctx.complex(1.0, 1.0), ctx.complex(1.0, -1.0)]);
        assert_eq!(red.monomials().len(), 4);
        let label = classify_case(&red, ctx).unwrap().label;
        assert!(label.starts_with("not applicable: L(0) = 0"), "{label}");
    }

    #[test]
    fn ex2_reduces_with_double_root() {
        let fx = ex2_default(192).unwrap();
        let red = fx.reduce().unwrap();
        let ctx = &fx.ctx;
        let qr = ctx.power(&fx.lambda).unwrap();
        // L = (xi - q^r)^2
        let want = [
            Complex::with_val(192, qr.square_ref()),
            Complex::with_val(192, &qr * -2i32),
            ctx.one(),
        ];
        for (a, b) in red.l_coeffs().iter().zip(&want) {
            assert!(ctx.approx_eq(a, b), "{a} vs {b}");
        }
        assert_eq!(red.arity(), 2);
        let c = classify_case(&red, ctx).unwrap();
        assert_eq!(c.label, "general Theorem 1");
        assert!(c.degree_equals_order && c.l_zero_nonzero);
    }

    #[test]
    fn synthetic_is_case_b() {
        let fx = synthetic(192).unwrap();
        let red = fx.reduce().unwrap();
        assert_eq!(red.generators(), &[fx.ctx.one()]);
        assert_eq!(classify_case(&red, &fx.ctx).unwrap().label, "case (b)");
    }

    #[test]
    fn ex3_polynomial_has_the_three_roots() {
        let e = ex3(512).unwrap();
        for a in &e.roots {
            let v = crate::reduction::horner(&e.l_coeffs, a, 512);
            assert!(abs(&v) < 1e-140);
        }
        assert_eq!(e.equation.order(), 3);
        assert_eq!(e.equation.terms().len(), 6);
    }

    #[test]
    fn closed_recurrence_first_value() {
        let c = ex1_subseries(&Complex::with_val(192, 0.5), 3, 192);
        // 0.25 / (e^{-sqrt2 pi}(1 - e^{-sqrt2 pi}))
        assert!((c[1].real().to_f64() - 21.507_9).abs() < 1e-4);
        let logs = ex1_subseries_logs(&Float::with_val(192, 0.5), 3, 192);
        for m in 0..=3 {
            let direct = Float::with_val(192, c[m].real().ln_ref());
            assert!(Float::with_val(192, &direct - &logs[m]).abs() < 1e-50);
        }
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert!(matches!(by_name("ex9", 64), Err(Error::UnknownExample(_))));
    }
}
