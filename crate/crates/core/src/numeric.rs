//! Arbitrary-precision complex arithmetic around a fixed dilation base `q`.
//!
//! All values are `rug` floats at the context precision. The logarithm of `q`
//! is taken on the branch `0 <= arg q < 2*pi` and cached, so that the character
//! `alpha -> q^alpha = exp(alpha * ln q)` is a well defined homomorphism from
//! the additive group of exponents into the multiplicative group.
//!
//! Zero and equality tests use the absolute or relative threshold
//! `2^-(precision_bits - guard_bits)`.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Integer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PRECISION_BITS: u32 = 192;
pub const DEFAULT_GUARD_BITS: u32 = 32;

/// Integer exponents up to this size are evaluated by repeated squaring.
const INTEGER_POWER_LIMIT: u32 = 1 << 20;

#[derive(Clone, Debug)]
pub struct QContext {
    q: Complex,
    ln_q: Complex,
    precision_bits: u32,
    guard_bits: u32,
}

impl QContext {
    pub fn new(q: Complex, precision_bits: u32) -> Result<Self> {
        Self::with_guard(q, precision_bits, DEFAULT_GUARD_BITS)
    }

    pub fn with_guard(q: Complex, precision_bits: u32, guard_bits: u32) -> Result<Self> {
        if precision_bits <= guard_bits {
            return Err(Error::Domain(format!(
                "precision ({precision_bits} bits) must exceed the guard ({guard_bits} bits)"
            )));
        }
        let q = Complex::with_val(precision_bits, &q);
        if q.real().is_zero() && q.imag().is_zero() {
            return Err(Error::InvalidQ);
        }
        if q.imag().is_zero() && *q.real() == 1 {
            return Err(Error::InvalidQ);
        }
        let ln_q = fixed_log(&q)?;
        Ok(QContext {
            q,
            ln_q,
            precision_bits,
            guard_bits,
        })
    }

    /// The same `q` value carried to a different precision.
    pub fn with_precision(&self, precision_bits: u32) -> Result<Self> {
        Self::with_guard(self.q.clone(), precision_bits, self.guard_bits)
    }

    pub fn q(&self) -> &Complex {
        &self.q
    }

    /// `ln q` on the branch `0 <= arg q < 2*pi`, computed once at construction.
    pub fn fixed_log(&self) -> &Complex {
        &self.ln_q
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn guard_bits(&self) -> u32 {
        self.guard_bits
    }

    /// `2^-(precision_bits - guard_bits)`.
    pub fn threshold(&self) -> Float {
        let exp = -((self.precision_bits - self.guard_bits) as i32);
        Float::with_val(self.precision_bits, Float::i_exp(1, exp))
    }

    /// `q^alpha = exp(alpha * ln q)`; small integer exponents use exact repeated squaring.
    pub fn power(&self, alpha: &Complex) -> Result<Complex> {
        if alpha.imag().is_zero() && alpha.real().is_integer() {
            if let Some(k) = alpha.real().to_i32_saturating() {
                if k.unsigned_abs() <= INTEGER_POWER_LIMIT {
                    return self.power_int(k);
                }
            }
        }
        let arg = Complex::with_val(self.precision_bits, alpha * &self.ln_q);
        let value = arg.exp();
        if !value.real().is_finite() || !value.imag().is_finite() {
            return Err(Error::Overflow(format!("q^({})", fmt_complex(alpha, 12))));
        }
        Ok(value)
    }

    pub fn power_int(&self, k: i32) -> Result<Complex> {
        let value: Complex = if k >= 0 {
            Complex::with_val(self.precision_bits, (&self.q).pow(k as u32))
        } else {
            let pos = Complex::with_val(self.precision_bits, (&self.q).pow(k.unsigned_abs()));
            Complex::with_val(self.precision_bits, 1 / pos)
        };
        if !value.real().is_finite() || !value.imag().is_finite() {
            return Err(Error::Overflow(format!("q^{k}")));
        }
        Ok(value)
    }

    pub fn real(&self, v: f64) -> Float {
        Float::with_val(self.precision_bits, v)
    }

    pub fn complex(&self, re: f64, im: f64) -> Complex {
        Complex::with_val(self.precision_bits, (re, im))
    }

    pub fn zero(&self) -> Complex {
        Complex::new(self.precision_bits)
    }

    pub fn one(&self) -> Complex {
        Complex::with_val(self.precision_bits, 1)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.precision_bits, Constant::Pi)
    }

    /// `|value| <= threshold * scale`.
    pub fn is_negligible(&self, value: &Complex, scale: &Float) -> bool {
        let bound = Float::with_val(self.precision_bits, self.threshold() * scale);
        abs(value) <= bound
    }

    /// Equality up to `threshold * max(1, |a|, |b|)`.
    pub fn approx_eq(&self, a: &Complex, b: &Complex) -> bool {
        let diff = Complex::with_val(self.precision_bits, a - b);
        let scale = abs(a).max(&abs(b)).max(&Float::with_val(self.precision_bits, 1));
        self.is_negligible(&diff, &scale)
    }
}

/// `ln|z| + i arg z` with `arg z` in `[0, 2*pi)`.
pub fn fixed_log(z: &Complex) -> Result<Complex> {
    if z.real().is_zero() && z.imag().is_zero() {
        return Err(Error::Domain("logarithm of zero".into()));
    }
    let prec = z.prec().0.max(z.prec().1);
    let mut ln = Complex::with_val(prec, z.ln_ref());
    if ln.imag().is_sign_negative() && !ln.imag().is_zero() {
        let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
        *ln.mut_imag() += two_pi;
    }
    // -pi..pi shifted into 0..2pi can round up to exactly 2pi
    let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
    if *ln.imag() >= two_pi {
        *ln.mut_imag() -= two_pi;
    }
    if ln.imag().is_zero() {
        // normalise -0
        ln.mut_imag().assign_zero();
    }
    Ok(ln)
}

trait AssignZero {
    fn assign_zero(&mut self);
}

impl AssignZero for Float {
    fn assign_zero(&mut self) {
        *self = Float::new(self.prec());
    }
}

/// `min over m in Z of |w - 2*pi*i*m|` and the minimising `m`.
pub fn lattice_distance(w: &Complex) -> (Float, Integer) {
    let prec = w.prec().0.max(w.prec().1);
    let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
    let ratio = Float::with_val(prec, w.imag() / &two_pi);
    let m = ratio
        .round()
        .to_integer()
        .expect("finite imaginary part");
    let offset = Float::with_val(prec, w.imag() - Float::with_val(prec, &two_pi * &m));
    let dist = Float::with_val(prec, w.real().hypot_ref(&offset));
    (dist, m)
}

/// The Liouville constant `sum_{k>=1} 10^(-k!)`, summed until the next term
/// falls below the working precision.
pub fn liouville_constant(precision_bits: u32) -> Float {
    let digits = (precision_bits as f64 * std::f64::consts::LOG10_2).ceil() as u64 + 4;
    let mut sum = Float::new(precision_bits);
    let mut factorial: u64 = 1;
    let mut k: u64 = 1;
    while factorial <= digits {
        let term = Float::with_val(precision_bits, Float::i_pow_u(10, factorial as u32));
        sum += Float::with_val(precision_bits, term.recip_ref());
        k += 1;
        factorial *= k;
    }
    sum
}

pub fn abs(z: &Complex) -> Float {
    let prec = z.prec().0.max(z.prec().1);
    Float::with_val(prec, z.abs_ref())
}

/// Short human-readable rendering, `digits` significant digits per part.
pub fn fmt_complex(z: &Complex, digits: usize) -> String {
    let re = z.real().to_string_radix(10, Some(digits));
    let im = z.imag().to_string_radix(10, Some(digits));
    if let Some(mag) = im.strip_prefix('-') {
        format!("{re}-{mag}i")
    } else {
        format!("{re}+{im}i")
    }
}

/// Decimal string that parses back to the same value at the same precision.
pub fn float_to_decimal(x: &Float) -> String {
    x.to_string_radix(10, None)
}

pub fn parse_float(text: &str, precision_bits: u32) -> Result<Float> {
    let parsed = Float::parse(text.trim())
        .map_err(|e| Error::Malformed(format!("invalid decimal `{text}`: {e}")))?;
    Ok(Float::with_val(precision_bits, parsed))
}

/// `{re, im}` pair of decimal strings, the on-disk form of every complex value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: String,
    pub im: String,
}

impl ComplexJson {
    pub fn from_complex(z: &Complex) -> Self {
        ComplexJson {
            re: float_to_decimal(z.real()),
            im: float_to_decimal(z.imag()),
        }
    }

    pub fn to_complex(&self, precision_bits: u32) -> Result<Complex> {
        let re = parse_float(&self.re, precision_bits)?;
        let im = parse_float(&self.im, precision_bits)?;
        Ok(Complex::with_val(precision_bits, (re, im)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex1_q(prec: u32) -> Complex {
        // q = exp(-(sqrt2/2) pi (1 - i))
        let pi = Float::with_val(prec, Constant::Pi);
        let h = Float::with_val(prec, Float::with_val(prec, 2).sqrt() / 2u32) * &pi;
        let w = Complex::with_val(prec, (-h.clone(), h));
        w.exp()
    }

    #[test]
    fn fixed_log_of_i() {
        let ctx = QContext::new(Complex::with_val(192, (0, 1)), 192).unwrap();
        let half_pi = ctx.pi() / 2u32;
        assert!(ctx.fixed_log().real().is_zero());
        assert_eq!(*ctx.fixed_log().imag(), half_pi);
    }

    #[test]
    fn fixed_log_of_two_is_real() {
        let ctx = QContext::new(Complex::with_val(192, 2), 192).unwrap();
        assert!(ctx.fixed_log().imag().is_zero());
        assert_eq!(*ctx.fixed_log().real(), Float::with_val(192, 2).ln());
    }

    #[test]
    fn fixed_log_example1_branch() {
        let ctx = QContext::new(ex1_q(192), 128).unwrap();
        let ln = ctx.fixed_log();
        let pi = ctx.pi();
        let h = Float::with_val(128, Float::with_val(128, 2).sqrt() / 2u32) * &pi;
        let expected = Complex::with_val(128, (-h.clone(), h));
        assert!(ctx.approx_eq(ln, &expected));
        let back = Complex::with_val(128, ln.exp_ref());
        assert!(ctx.approx_eq(&back, ctx.q()));
        let arg = ln.imag().to_f64();
        assert!((arg - 2.221_441_469_079_183).abs() < 1e-12);
    }

    #[test]
    fn fixed_log_negative_real_axis_is_pi() {
        let l = fixed_log(&Complex::with_val(128, -1)).unwrap();
        assert!((l.imag().to_f64() - std::f64::consts::PI).abs() < 1e-15);
        let l = fixed_log(&Complex::with_val(128, (1, -1e-30))).unwrap();
        assert!((l.imag().to_f64() - std::f64::consts::TAU).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_q() {
        assert!(matches!(
            QContext::new(Complex::new(64), 128),
            Err(Error::InvalidQ)
        ));
        assert!(matches!(
            QContext::new(Complex::with_val(64, 1), 128),
            Err(Error::InvalidQ)
        ));
        assert!(fixed_log(&Complex::new(64)).is_err());
    }

    #[test]
    fn fixed_log_is_cached_bit_identical() {
        let ctx = QContext::new(ex1_q(192), 192).unwrap();
        let a = ctx.fixed_log().clone();
        let b = ctx.fixed_log().clone();
        assert_eq!(a, b);
        let c = ctx.clone();
        assert_eq!(c.fixed_log().real().to_string_radix(16, None), a.real().to_string_radix(16, None));
    }

    #[test]
    fn example1_generator_powers() {
        let ctx = QContext::new(ex1_q(192), 192).unwrap();
        let pi = ctx.pi();
        let s2pi = Float::with_val(192, Float::with_val(192, 2).sqrt() * &pi);
        let q1 = ctx.power(&ctx.complex(1.0, 1.0)).unwrap();
        let want = Complex::with_val(192, (-s2pi.clone()).exp());
        assert!(ctx.approx_eq(&q1, &want));
        let q2 = ctx.power(&ctx.complex(1.0, -1.0)).unwrap();
        assert!(ctx.approx_eq(&Complex::with_val(192, abs(&q2)), &ctx.one()));
        let want2 = Complex::with_val(192, (Float::new(192), s2pi)).exp();
        assert!(ctx.approx_eq(&q2, &want2));
        assert_eq!(ctx.power(&ctx.zero()).unwrap(), ctx.one());
    }

    #[test]
    fn power_overflow_is_reported() {
        let ctx = QContext::new(Complex::with_val(64, 2), 64).unwrap();
        let huge = Complex::with_val(64, (Float::with_val(64, Float::i_exp(1, 70)), 0.5));
        assert!(matches!(ctx.power(&huge), Err(Error::Overflow(_))));
    }

    #[test]
    fn lattice_distance_examples() {
        let (d, m) = lattice_distance(&Complex::new(128));
        assert!(d.is_zero());
        assert_eq!(m, 0);

        let two_pi = Float::with_val(128, Constant::Pi) * 2u32;
        let w = Complex::with_val(128, (0.3, Float::with_val(128, &two_pi * 7u32)));
        let (d, m) = lattice_distance(&w);
        assert_eq!(m, 7);
        assert!((d.to_f64() - 0.3).abs() < 1e-30);

        // pi (sqrt2 + 2 i (1 - sqrt2/2))
        let pi = Float::with_val(128, Constant::Pi);
        let sqrt2 = Float::with_val(128, 2).sqrt();
        let re = Float::with_val(128, &sqrt2 * &pi);
        let im = Float::with_val(128, &two_pi * Float::with_val(128, 1 - Float::with_val(128, &sqrt2 / 2u32)));
        let w = Complex::with_val(128, (re.clone(), im.clone()));
        let (d, m) = lattice_distance(&w);
        let expected = Float::with_val(128, re.hypot_ref(&im));
        assert_eq!(m, 0);
        assert!((d.to_f64() - expected.to_f64()).abs() < 1e-30);

        // brute-force oracle over m in [-1000, 1000]
        let w = Complex::with_val(128, (re.clone(), Float::with_val(128, &im + Float::with_val(128, &two_pi * 3u32))));
        let brute = (-1000i32..=1000)
            .map(|k| {
                let shifted = Float::with_val(128, w.imag() - Float::with_val(128, &two_pi * k));
                Float::with_val(128, w.real().hypot_ref(&shifted))
            })
            .min_by(|a, b| a.partial_cmp(b).unwrap())
            .unwrap();
        let (d, m) = lattice_distance(&w);
        assert_eq!(m, 3);
        assert!(Float::with_val(128, &d - &brute).abs() < 1e-35);
    }

    #[test]
    fn branch_choice_does_not_change_the_distance() {
        // ln a on the principal branch vs the fixed branch differ by 2 pi i
        let ctx = QContext::new(ex1_q(192), 192).unwrap();
        let a = ctx.power(&ctx.complex(0.0, 1.0)).unwrap();
        let fixed = fixed_log(&a).unwrap();
        let principal = Complex::with_val(192, a.ln_ref());
        assert!(!ctx.approx_eq(&fixed, &principal));
        let w = ctx.complex(0.7, 2.5);
        let (d1, _) = lattice_distance(&Complex::with_val(192, &w - &fixed));
        let (d2, _) = lattice_distance(&Complex::with_val(192, &w - &principal));
        assert!(Float::with_val(192, &d1 - &d2).abs() < ctx.threshold());
    }

    #[test]
    fn complex_json_round_trip_is_exact() {
        let ctx = QContext::new(ex1_q(192), 192).unwrap();
        let z = ctx.fixed_log().clone();
        let j = ComplexJson::from_complex(&z);
        let back = j.to_complex(192).unwrap();
        assert_eq!(back, z);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn lattice_distance_is_periodic(re in -5.0f64..5.0, im in -50.0f64..50.0, k in -1000i32..1000) {
                let prec = 192;
                let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
                let w = Complex::with_val(prec, (re, im));
                let shifted = Complex::with_val(prec, (re, Float::with_val(prec, im + Float::with_val(prec, &two_pi * k))));
                let (d1, m1) = lattice_distance(&w);
                let (d2, m2) = lattice_distance(&shifted);
                let tol = Float::with_val(prec, Float::i_exp(1, -150));
                prop_assert!(Float::with_val(prec, &d1 - &d2).abs() <= tol);
                prop_assert_eq!(m2, m1 + k);
            }

            #[test]
            fn power_is_a_character(ar in -3.0f64..3.0, ai in -3.0f64..3.0, br in -3.0f64..3.0, bi in -3.0f64..3.0) {
                let ctx = QContext::new(ex1_q(192), 192).unwrap();
                let a = ctx.complex(ar, ai);
                let b = ctx.complex(br, bi);
                let sum = Complex::with_val(192, &a + &b);
                let lhs = ctx.power(&sum).unwrap();
                let rhs = Complex::with_val(192, ctx.power(&a).unwrap() * ctx.power(&b).unwrap());
                let diff = Complex::with_val(192, &lhs - &rhs);
                prop_assert!(ctx.is_negligible(&diff, &abs(&lhs)));
            }
        }
    }
}
