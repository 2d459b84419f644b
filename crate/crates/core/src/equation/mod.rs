//! The polynomial `F(z, y_0, ..., y_n)` of a q-difference equation, with
//! `y_k` standing for `sigma^k y`.
//!
//! Equations are typed as text (see [`QDiffEquation::parse`]) and kept in a
//! term-list normal form: one term per `(z-exponent, y-powers)` pair.

mod lexer;
mod parser;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use rug::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{float_to_decimal, QContext};
use crate::series::{exponent_order, GenSeries, Term};

pub const MAX_Y_POWER: u32 = 64;
pub const MAX_ORDER: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: String) -> Self {
        ParseError { line, column, message }
    }
}

/// `coeff * z^z_exponent * prod_k y_k^powers[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EqTerm {
    pub z_exponent: Complex,
    pub powers: Vec<u32>,
    pub coeff: Complex,
}

impl EqTerm {
    pub fn y_degree(&self) -> u32 {
        self.powers.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QDiffEquation {
    order: usize,
    terms: Vec<EqTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub order: usize,
    pub linear: bool,
    pub max_y_degree: u32,
    pub term_count: usize,
    pub distinct_z_exponents: usize,
    pub min_z_exponent_re: f64,
    pub max_z_exponent_re: f64,
}

impl QDiffEquation {
    /// Normalizes the terms (padding powers to `order + 1`, merging equal keys,
    /// dropping zeros) and checks the structural invariants.
    pub fn new(order: usize, terms: Vec<EqTerm>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidEquation("order n must be at least 1 (no sigma[y] present)".into()));
        }
        if order > MAX_ORDER {
            return Err(Error::InvalidEquation(format!("order {order} exceeds the cap of {MAX_ORDER}")));
        }
        let mut merged: Vec<EqTerm> = Vec::with_capacity(terms.len());
        for mut t in terms {
            if t.powers.len() > order + 1 {
                if t.powers[order + 1..].iter().any(|&p| p > 0) {
                    return Err(Error::InvalidEquation("term uses a dilation above the order".into()));
                }
                t.powers.truncate(order + 1);
            }
            t.powers.resize(order + 1, 0);
            if t.powers.iter().any(|&p| p > MAX_Y_POWER) {
                return Err(Error::InvalidEquation(format!("y-power exceeds the cap of {MAX_Y_POWER}")));
            }
            if t.z_exponent.real().is_sign_negative() && !t.z_exponent.real().is_zero() {
                return Err(Error::InvalidEquation("z-exponents must have nonnegative real part".into()));
            }
            match merged
                .iter_mut()
                .find(|m| m.powers == t.powers && m.z_exponent == t.z_exponent)
            {
                Some(m) => m.coeff += &t.coeff,
                None => merged.push(t),
            }
        }
        merged.retain(|t| !(t.coeff.real().is_zero() && t.coeff.imag().is_zero()));
        if merged.is_empty() {
            return Err(Error::InvalidEquation("equation has no terms".into()));
        }
        if merged.iter().all(|t| t.y_degree() == 0) {
            return Err(Error::InvalidEquation("equation does not involve y".into()));
        }
        merged.sort_by(canonical_order);
        Ok(QDiffEquation { order, terms: merged })
    }

    /// Parses `lhs = rhs`; free identifiers are looked up in `params`.
    pub fn parse(text: &str, ctx: &QContext, params: &HashMap<String, Complex>) -> Result<Self> {
        let terms = parser::parse_polynomial(text, ctx, params)?;
        let order = terms.iter().map(|t| t.powers.len()).max().unwrap_or(0).saturating_sub(1);
        Self::new(order, terms)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> &[EqTerm] {
        &self.terms
    }

    pub fn precision_bits(&self) -> u32 {
        self.terms[0].coeff.prec().0
    }

    /// Canonical text; parsing it at the same precision gives back `self` exactly.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            out.push_str(&render_complex(&t.coeff));
            if !(t.z_exponent.real().is_zero() && t.z_exponent.imag().is_zero()) {
                out.push_str("*z^");
                out.push_str(&render_complex(&t.z_exponent));
            }
            for (k, &p) in t.powers.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                let var = match k {
                    0 => "y".to_string(),
                    1 => "sigma[y]".to_string(),
                    _ => format!("sigma^{k}[y]"),
                };
                out.push('*');
                out.push_str(&var);
                if p > 1 {
                    out.push_str(&format!("^{p}"));
                }
            }
        }
        out.push_str(" = 0");
        out
    }

    pub fn validate(&self) -> Diagnostics {
        let max_y_degree = self.terms.iter().map(EqTerm::y_degree).max().unwrap_or(0);
        let mut exps: Vec<&Complex> = self.terms.iter().map(|t| &t.z_exponent).collect();
        exps.sort_by(|a, b| exponent_order(a, b));
        exps.dedup_by(|a, b| a == b);
        let res: Vec<f64> = exps.iter().map(|e| e.real().to_f64()).collect();
        Diagnostics {
            order: self.order,
            linear: max_y_degree <= 1,
            max_y_degree,
            term_count: self.terms.len(),
            distinct_z_exponents: exps.len(),
            min_z_exponent_re: res.iter().copied().fold(f64::INFINITY, f64::min),
            max_z_exponent_re: res.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

impl fmt::Display for QDiffEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Evaluates a constant expression (`0.3+0.2*I`, `sqrt(2)-1`, `q^(I)`, ...).
pub fn parse_constant(text: &str, ctx: &QContext, params: &HashMap<String, Complex>) -> Result<Complex> {
    Ok(parser::parse_constant(text, ctx, params)?)
}

/// Parses a `y`-free expression in `z` such as `c00*z^I` into a series with
/// no truncation; used for initial parts.
pub fn parse_series(text: &str, ctx: &QContext, params: &HashMap<String, Complex>) -> Result<GenSeries> {
    let terms = parser::parse_polynomial(&format!("{text} = 0"), ctx, params)?;
    if terms.iter().any(|t| t.y_degree() > 0) {
        return Err(Error::Malformed(format!("`{text}` involves y")));
    }
    let terms = terms.into_iter().map(|t| Term::new(t.z_exponent, t.coeff)).collect();
    Ok(GenSeries::from_terms(ctx, terms, f64::INFINITY))
}

fn canonical_order(a: &EqTerm, b: &EqTerm) -> Ordering {
    a.y_degree()
        .cmp(&b.y_degree())
        .then_with(|| b.powers.cmp(&a.powers))
        .then_with(|| exponent_order(&a.z_exponent, &b.z_exponent))
}

fn render_complex(z: &Complex) -> String {
    format!("({} + {}*I)", float_to_decimal(z.real()), float_to_decimal(z.imag()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::float::Constant;
    use rug::Float;

    fn ex1_ctx() -> QContext {
        let prec = 192;
        let pi = Float::with_val(prec, Constant::Pi);
        let h = Float::with_val(prec, Float::with_val(prec, 2).sqrt() / 2u32) * &pi;
        QContext::new(Complex::with_val(prec, (-h.clone(), h)).exp(), prec).unwrap()
    }

    fn no_params() -> HashMap<String, Complex> {
        HashMap::new()
    }

    const EX1: &str = "sigma^2[y] - q^(I)*sigma[y] + q^(2*I)*z*(1 + y^2) = 0";
    const EX2: &str = "y*sigma^2[y] - sigma[y]^2 - z^2*y^4 - z^2 = 0";

    #[test]
    fn initial_parts_parse_as_series() {
        let ctx = ex1_ctx();
        let mut params = no_params();
        params.insert("c00".into(), Complex::with_val(192, 0.5));
        let s = parse_series("c00*z^I", &ctx, &params).unwrap();
        assert_eq!(s.len(), 1);
        let t = s.leading().unwrap();
        assert_eq!(t.exponent, Complex::with_val(192, (0, 1)));
        assert_eq!(t.coeff, Complex::with_val(192, 0.5));
        assert!(matches!(parse_series("z*y", &ctx, &params), Err(Error::Malformed(_))));
    }

    fn find<'a>(eq: &'a QDiffEquation, z: &Complex, powers: &[u32]) -> &'a Complex {
        &eq.terms()
            .iter()
            .find(|t| &t.z_exponent == z && t.powers == powers)
            .unwrap_or_else(|| panic!("missing term {powers:?}"))
            .coeff
    }

    #[test]
    fn parses_example1() {
        let ctx = ex1_ctx();
        let eq = QDiffEquation::parse(EX1, &ctx, &no_params()).unwrap();
        assert_eq!(eq.order(), 2);
        assert_eq!(eq.terms().len(), 4);
        let qi = ctx.power(&ctx.complex(0.0, 1.0)).unwrap();
        let q2i = ctx.power(&ctx.complex(0.0, 2.0)).unwrap();
        assert_eq!(*find(&eq, &ctx.zero(), &[0, 0, 1]), ctx.one());
        assert_eq!(*find(&eq, &ctx.zero(), &[0, 1, 0]), -qi);
        assert_eq!(*find(&eq, &ctx.one(), &[0, 0, 0]), q2i);
        assert_eq!(*find(&eq, &ctx.one(), &[2, 0, 0]), q2i);
    }

    #[test]
    fn parses_example2_and_linear() {
        let ctx = ex1_ctx();
        let eq = QDiffEquation::parse(EX2, &ctx, &no_params()).unwrap();
        let d = eq.validate();
        assert_eq!((d.order, d.max_y_degree, d.linear), (2, 4, false));

        let lin = QDiffEquation::parse("sigma[y] - 2*y - z = 0", &ctx, &no_params()).unwrap();
        assert_eq!(lin.order(), 1);
        assert!(lin.validate().linear);

        let mut params = HashMap::new();
        params.insert("a0".to_string(), ctx.complex(1.5, 0.0));
        params.insert("a1".to_string(), ctx.complex(-2.0, 1.0));
        params.insert("b".to_string(), ctx.complex(0.25, 0.0));
        let lin = QDiffEquation::parse("a0*y + a1*sigma[y] + b*z = 0", &ctx, &params).unwrap();
        assert!(lin.validate().linear);

        let d = QDiffEquation::parse(EX1, &ctx, &no_params()).unwrap().validate();
        assert_eq!((d.order, d.max_y_degree, d.linear), (2, 2, false));
    }

    #[test]
    fn render_round_trips() {
        let ctx = ex1_ctx();
        for text in [EX1, EX2, "sigma[y] - 2*y - z = 0", "sigma[y] - 3*y - z - y^2 = 0"] {
            let eq = QDiffEquation::parse(text, &ctx, &no_params()).unwrap();
            let back = QDiffEquation::parse(&eq.render(), &ctx, &no_params()).unwrap();
            assert_eq!(back, eq, "{text}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        let ctx = ex1_ctx();
        let p = no_params();
        assert!(matches!(QDiffEquation::parse("0 = 0", &ctx, &p), Err(Error::InvalidEquation(_))));
        assert!(matches!(QDiffEquation::parse("y/y = 1", &ctx, &p), Err(Error::Parse(_))));
        assert!(matches!(QDiffEquation::parse("y^z = 1", &ctx, &p), Err(Error::Parse(_))));
        assert!(matches!(QDiffEquation::parse("y^0.5 + sigma[y] = 1", &ctx, &p), Err(Error::Parse(_))));
        assert!(matches!(QDiffEquation::parse("sigma[y] + y^65 = 0", &ctx, &p), Err(Error::Parse(_))));
        assert!(matches!(QDiffEquation::parse("sigma^17[y] = 0", &ctx, &p), Err(Error::Parse(_))));
        assert!(matches!(QDiffEquation::parse("y = z", &ctx, &p), Err(Error::InvalidEquation(_))));
        let err = match QDiffEquation::parse("sigma[y] +\n  * y = 0", &ctx, &p) {
            Err(Error::Parse(e)) => e,
            other => panic!("unexpected {other:?}"),
        };
        assert_eq!((err.line, err.column), (2, 3));
        assert!(QDiffEquation::new(1, Vec::new()).is_err());
    }

    #[test]
    fn constants() {
        let ctx = ex1_ctx();
        let p = no_params();
        let v = parse_constant("0.3+0.2*I", &ctx, &p).unwrap();
        assert_eq!(v.real().to_f64(), 0.3);
        assert_eq!(v.imag().to_f64(), 0.2);
        let w = parse_constant("sqrt(2)-1", &ctx, &p).unwrap();
        assert!((w.real().to_f64() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        let e = parse_constant("e^(I*pi)", &ctx, &p).unwrap();
        assert!((e.real().to_f64() + 1.0).abs() < 1e-30);
        let ell = parse_constant("ell", &ctx, &p).unwrap();
        assert!((ell.real().to_f64() - 0.110_001).abs() < 1e-17);
        // i^(4 ell) on the fixed branch is exp(2 pi i ell)
        let r = parse_constant("I^(4*ell)", &ctx, &p).unwrap();
        let want = parse_constant("e^(2*pi*I*ell)", &ctx, &p).unwrap();
        assert!(ctx.approx_eq(&r, &want));
    }

    mod fuzz {
        use super::*;
        use proptest::prelude::*;

        fn atom() -> impl Strategy<Value = String> {
            prop_oneof![
                Just("y".to_string()),
                Just("z".to_string()),
                Just("sigma[y]".to_string()),
                Just("sigma^2[y]".to_string()),
                Just("q^(I)".to_string()),
                Just("I".to_string()),
                Just("pi".to_string()),
                (1u32..20).prop_map(|k| k.to_string()),
                (0.0f64..10.0).prop_map(|x| format!("{x}")),
            ]
        }

        fn expr() -> impl Strategy<Value = String> {
            atom().prop_recursive(4, 24, 3, |inner| {
                prop_oneof![
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} + {b}")),
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} - {b}")),
                    (inner.clone(), 0u32..3).prop_map(|(a, k)| format!("({a})^{k}")),
                    inner.prop_map(|a| format!("-{a}")),
                ]
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn parse_render_is_identity(lhs in expr(), rhs in expr()) {
                let ctx = ex1_ctx();
                let text = format!("sigma[y] + {lhs} = {rhs}");
                if let Ok(eq) = QDiffEquation::parse(&text, &ctx, &no_params()) {
                    let back = QDiffEquation::parse(&eq.render(), &ctx, &no_params()).unwrap();
                    prop_assert_eq!(back, eq);
                }
            }

            #[test]
            fn parser_never_panics(text in "[yzqI0-9+*/^()\\[\\]=. a-z-]{0,40}") {
                let ctx = ex1_ctx();
                let _ = QDiffEquation::parse(&text, &ctx, &no_params());
            }
        }
    }
}
