//! Recursive-descent parser that evaluates an equation straight into the
//! term-list normal form. Every constant is evaluated at the context precision.

use std::collections::HashMap;

use rug::float::Constant;
use rug::{Complex, Float};

use super::lexer::{tokenize, Spanned, Token};
use super::{EqTerm, ParseError, MAX_ORDER, MAX_Y_POWER};
use crate::numeric::{fixed_log, liouville_constant, QContext};

/// A polynomial in `z^e` (complex `e`) and `y_0, ..., y_n` being built up.
#[derive(Clone, Debug)]
struct Poly {
    terms: Vec<EqTerm>,
}

impl Poly {
    fn constant(c: Complex) -> Self {
        let prec = c.prec().0;
        Poly {
            terms: vec![EqTerm {
                z_exponent: Complex::new(prec),
                powers: Vec::new(),
                coeff: c,
            }],
        }
        .normalized()
    }

    fn variable(prec: u32, index: usize) -> Self {
        let mut powers = vec![0; index + 1];
        powers[index] = 1;
        Poly {
            terms: vec![EqTerm {
                z_exponent: Complex::new(prec),
                powers,
                coeff: Complex::with_val(prec, 1),
            }],
        }
    }

    fn z(prec: u32) -> Self {
        Poly {
            terms: vec![EqTerm {
                z_exponent: Complex::with_val(prec, 1),
                powers: Vec::new(),
                coeff: Complex::with_val(prec, 1),
            }],
        }
    }

    fn normalized(mut self) -> Self {
        for t in &mut self.terms {
            while t.powers.last() == Some(&0) {
                t.powers.pop();
            }
        }
        let mut merged: Vec<EqTerm> = Vec::with_capacity(self.terms.len());
        for t in self.terms {
            match merged
                .iter_mut()
                .find(|m| m.powers == t.powers && m.z_exponent == t.z_exponent)
            {
                Some(m) => m.coeff += &t.coeff,
                None => merged.push(t),
            }
        }
        merged.retain(|t| !(t.coeff.real().is_zero() && t.coeff.imag().is_zero()));
        Poly { terms: merged }
    }

    /// The value if this is a plain number (no `z`, no `y`).
    fn as_constant(&self, prec: u32) -> Option<Complex> {
        match self.terms.as_slice() {
            [] => Some(Complex::new(prec)),
            [t] if t.powers.is_empty() && t.z_exponent.real().is_zero() && t.z_exponent.imag().is_zero() => {
                Some(t.coeff.clone())
            }
            _ => None,
        }
    }

    /// The exponent `e` if this is exactly `z^e`.
    fn as_pure_z(&self) -> Option<&Complex> {
        match self.terms.as_slice() {
            [t] if t.powers.is_empty() && t.coeff == 1 => Some(&t.z_exponent),
            _ => None,
        }
    }

    fn add(mut self, other: Poly) -> Poly {
        self.terms.extend(other.terms);
        self.normalized()
    }

    fn neg(mut self) -> Poly {
        for t in &mut self.terms {
            t.coeff = -t.coeff.clone();
        }
        self
    }

    fn mul(&self, other: &Poly, prec: u32) -> Poly {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let len = a.powers.len().max(b.powers.len());
                let powers = (0..len)
                    .map(|i| a.powers.get(i).copied().unwrap_or(0) + b.powers.get(i).copied().unwrap_or(0))
                    .collect();
                terms.push(EqTerm {
                    z_exponent: add_exact(&a.z_exponent, &b.z_exponent, prec),
                    powers,
                    coeff: Complex::with_val(prec, &a.coeff * &b.coeff),
                });
            }
        }
        Poly { terms }.normalized()
    }

    fn scale(mut self, c: &Complex, prec: u32) -> Poly {
        for t in &mut self.terms {
            t.coeff = Complex::with_val(prec, &t.coeff * c);
        }
        self.normalized()
    }

    fn max_power(&self) -> u32 {
        self.terms.iter().flat_map(|t| t.powers.iter().copied()).max().unwrap_or(0)
    }
}

/// `a + b`, skipping the addition when one side is zero so that exponents
/// like `1` or `I` survive unchanged.
fn add_exact(a: &Complex, b: &Complex, prec: u32) -> Complex {
    let zero = |z: &Complex| z.real().is_zero() && z.imag().is_zero();
    if zero(a) {
        Complex::with_val(prec, b)
    } else if zero(b) {
        Complex::with_val(prec, a)
    } else {
        Complex::with_val(prec, a + b)
    }
}

pub(crate) struct Parser<'a> {
    tokens: Vec<Spanned>,
    pos: usize,
    ctx: &'a QContext,
    params: &'a HashMap<String, Complex>,
    prec: u32,
}

pub(crate) fn parse_polynomial(
    text: &str,
    ctx: &QContext,
    params: &HashMap<String, Complex>,
) -> Result<Vec<EqTerm>, ParseError> {
    let mut p = Parser::new(text, ctx, params)?;
    let lhs = p.expr()?;
    p.expect(Token::Equals, "`=`")?;
    let rhs = p.expr()?;
    p.expect(Token::Eof, "end of input")?;
    Ok(lhs.add(rhs.neg()).terms)
}

/// Evaluates a constant expression such as `0.3+0.2*I` or `sqrt(2)-1`.
pub(crate) fn parse_constant(
    text: &str,
    ctx: &QContext,
    params: &HashMap<String, Complex>,
) -> Result<Complex, ParseError> {
    let mut p = Parser::new(text, ctx, params)?;
    let (line, column) = p.position();
    let value = p.expr()?;
    p.expect(Token::Eof, "end of input")?;
    value
        .as_constant(p.prec)
        .ok_or_else(|| ParseError::new(line, column, "expected a constant expression".into()))
}

impl<'a> Parser<'a> {
    fn new(text: &str, ctx: &'a QContext, params: &'a HashMap<String, Complex>) -> Result<Self, ParseError> {
        Ok(Parser {
            tokens: tokenize(text)?,
            pos: 0,
            ctx,
            params,
            prec: ctx.precision_bits(),
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos].token
    }

    fn position(&self) -> (usize, usize) {
        let t = &self.tokens[self.pos];
        (t.line, t.column)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (line, column) = self.position();
        Err(ParseError::new(line, column, message.into()))
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].token.clone();
        if t != Token::Eof {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.advance();
            Ok(())
        } else {
            self.error(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Token::Plus => {
                    self.advance();
                    acc = acc.add(self.term()?);
                }
                Token::Minus => {
                    self.advance();
                    acc = acc.add(self.term()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Token::Star => {
                    self.advance();
                    let rhs = self.unary()?;
                    acc = acc.mul(&rhs, self.prec);
                    self.check_caps(&acc)?;
                }
                Token::Slash => {
                    self.advance();
                    let (line, column) = self.position();
                    let rhs = self.unary()?;
                    let Some(c) = rhs.as_constant(self.prec) else {
                        return Err(ParseError::new(line, column, "division by a non-constant expression".into()));
                    };
                    if c.real().is_zero() && c.imag().is_zero() {
                        return Err(ParseError::new(line, column, "division by zero".into()));
                    }
                    let inv = Complex::with_val(self.prec, c.recip_ref());
                    acc = acc.scale(&inv, self.prec);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Poly, ParseError> {
        match self.peek() {
            Token::Minus => {
                self.advance();
                Ok(self.unary()?.neg())
            }
            Token::Plus => {
                self.advance();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly, ParseError> {
        let base_token = self.peek().clone();
        let base = self.atom()?;
        if *self.peek() != Token::Caret {
            return Ok(base);
        }
        self.advance();
        let (line, column) = self.position();
        let exponent = self.exponent()?;
        let Some(w) = exponent.as_constant(self.prec) else {
            return Err(ParseError::new(line, column, "exponent must be a constant".into()));
        };
        let at = |msg: String| ParseError::new(line, column, msg);

        if let Token::Ident(name) = &base_token {
            match name.as_str() {
                "q" if !self.params.contains_key("q") => {
                    let v = self.ctx.power(&w).map_err(|e| at(e.to_string()))?;
                    return Ok(Poly::constant(v));
                }
                "e" if !self.params.contains_key("e") => {
                    let v = Complex::with_val(self.prec, w.exp_ref());
                    return Ok(Poly::constant(v));
                }
                _ => {}
            }
        }
        if let Some(e) = base.as_pure_z() {
            let exp = if *e == 1 { w } else { Complex::with_val(self.prec, e * &w) };
            if exp.real().is_sign_negative() && !exp.real().is_zero() {
                return Err(at("z-exponents must have nonnegative real part".into()));
            }
            return Ok(Poly {
                terms: vec![EqTerm {
                    z_exponent: exp,
                    powers: Vec::new(),
                    coeff: Complex::with_val(self.prec, 1),
                }],
            });
        }
        if let Some(c) = base.as_constant(self.prec) {
            return constant_power(&c, &w, self.prec).map(Poly::constant).map_err(at);
        }
        let k = integer_exponent(&w).ok_or_else(|| at("a polynomial can only be raised to a nonnegative integer power".into()))?;
        if k < 0 || k as u32 > MAX_Y_POWER {
            return Err(at(format!("power {k} outside 0..={MAX_Y_POWER}")));
        }
        let mut acc = Poly::constant(Complex::with_val(self.prec, 1));
        for _ in 0..k {
            acc = acc.mul(&base, self.prec);
            self.check_caps(&acc).map_err(|e| at(e.message))?;
        }
        Ok(acc)
    }

    fn exponent(&mut self) -> Result<Poly, ParseError> {
        match self.peek() {
            Token::Minus => {
                self.advance();
                Ok(self.exponent()?.neg())
            }
            _ => self.atom(),
        }
    }

    fn check_caps(&self, p: &Poly) -> Result<(), ParseError> {
        if p.max_power() > MAX_Y_POWER {
            return self.error(format!("y-power exceeds the cap of {MAX_Y_POWER}"));
        }
        Ok(())
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        let (line, column) = self.position();
        match self.advance() {
            Token::Number(text) => {
                let parsed = Float::parse(&text)
                    .map_err(|e| ParseError::new(line, column, format!("invalid number `{text}`: {e}")))?;
                Ok(Poly::constant(Complex::with_val(self.prec, Float::with_val(self.prec, parsed))))
            }
            Token::LParen => {
                let inner = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Token::Ident(name) => self.identifier(&name, line, column),
            other => Err(ParseError::new(line, column, format!("unexpected {}", describe(&other)))),
        }
    }

    fn identifier(&mut self, name: &str, line: usize, column: usize) -> Result<Poly, ParseError> {
        if let Some(v) = self.params.get(name) {
            return Ok(Poly::constant(Complex::with_val(self.prec, v)));
        }
        let prec = self.prec;
        let value = match name {
            "y" => return Ok(Poly::variable(prec, 0)),
            "z" => return Ok(Poly::z(prec)),
            "sigma" => return self.sigma(line, column),
            "q" => Complex::with_val(prec, self.ctx.q()),
            "I" => Complex::with_val(prec, (0, 1)),
            "pi" => Complex::with_val(prec, Float::with_val(prec, Constant::Pi)),
            "e" => Complex::with_val(prec, Float::with_val(prec, 1).exp()),
            "ell" => Complex::with_val(prec, liouville_constant(prec)),
            "sqrt" | "exp" | "ln" => {
                self.expect(Token::LParen, "`(` after function name")?;
                let (l, c) = self.position();
                let arg = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                let Some(v) = arg.as_constant(prec) else {
                    return Err(ParseError::new(l, c, format!("{name} needs a constant argument")));
                };
                match name {
                    "sqrt" => Complex::with_val(prec, v.sqrt_ref()),
                    "exp" => Complex::with_val(prec, v.exp_ref()),
                    _ => fixed_log(&v).map_err(|e| ParseError::new(l, c, e.to_string()))?,
                }
            }
            _ => return Err(ParseError::new(line, column, format!("unknown identifier `{name}` (bind it with --param)"))),
        };
        Ok(Poly::constant(value))
    }

    /// `sigma[y]` or `sigma^k[y]`.
    fn sigma(&mut self, line: usize, column: usize) -> Result<Poly, ParseError> {
        let mut k = 1usize;
        if *self.peek() == Token::Caret {
            self.advance();
            let (l, c) = self.position();
            match self.advance() {
                Token::Number(t) => {
                    k = t
                        .parse::<usize>()
                        .map_err(|_| ParseError::new(l, c, format!("sigma power must be a nonnegative integer, got `{t}`")))?;
                }
                other => return Err(ParseError::new(l, c, format!("expected sigma power, found {}", describe(&other)))),
            }
        }
        if k > MAX_ORDER {
            return Err(ParseError::new(line, column, format!("order {k} exceeds the cap of {MAX_ORDER}")));
        }
        self.expect(Token::LBracket, "`[` after sigma")?;
        match self.advance() {
            Token::Ident(v) if v == "y" => {}
            _ => return Err(ParseError::new(line, column, "sigma applies to `y` only".into())),
        }
        self.expect(Token::RBracket, "`]`")?;
        Ok(Poly::variable(self.prec, k))
    }
}

fn integer_exponent(w: &Complex) -> Option<i64> {
    if !w.imag().is_zero() || !w.real().is_integer() {
        return None;
    }
    w.real().to_i32_saturating().map(i64::from)
}

/// `c^w` on the fixed branch; integer powers are evaluated by multiplication.
fn constant_power(c: &Complex, w: &Complex, prec: u32) -> Result<Complex, String> {
    if let Some(k) = integer_exponent(w) {
        if k.unsigned_abs() <= 4096 {
            if c.real().is_zero() && c.imag().is_zero() && k < 0 {
                return Err("zero raised to a negative power".into());
            }
            let p = Complex::with_val(prec, rug::ops::Pow::pow(c, k.unsigned_abs() as u32));
            return Ok(if k < 0 { Complex::with_val(prec, p.recip_ref()) } else { p });
        }
    }
    if c.real().is_zero() && c.imag().is_zero() {
        return Err("zero raised to a non-integer power".into());
    }
    let ln = fixed_log(c).map_err(|e| e.to_string())?;
    Ok(Complex::with_val(prec, Complex::with_val(prec, &ln * w).exp_ref()))
}

fn describe(t: &Token) -> String {
    match t {
        Token::Number(n) => format!("number `{n}`"),
        Token::Ident(i) => format!("`{i}`"),
        Token::Plus => "`+`".into(),
        Token::Minus => "`-`".into(),
        Token::Star => "`*`".into(),
        Token::Slash => "`/`".into(),
        Token::Caret => "`^`".into(),
        Token::LParen => "`(`".into(),
        Token::RParen => "`)`".into(),
        Token::LBracket => "`[`".into(),
        Token::RBracket => "`]`".into(),
        Token::Equals => "`=`".into(),
        Token::Eof => "end of input".into(),
    }
}
