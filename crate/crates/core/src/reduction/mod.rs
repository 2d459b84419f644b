//! The change of unknown `y = phi0 + z^lambda u` and the reduced equation
//! `L(q^lambda sigma) psi = M(z, psi, sigma psi, ..., sigma^n psi)`.

mod classify;
mod generators;
mod roots;

pub use classify::{classify_case, placement, Case, Classification, Placement, RootCheck, RootRegion};
pub use generators::{derive_generators, generator_order, represent, COMBINATION_BOUND};
pub use roots::{effective_degree, horner, horner_scale, polynomial_roots, Root, RootJson};

use std::collections::BTreeMap;

use rug::Complex;
use serde::{Deserialize, Serialize};

use crate::equation::QDiffEquation;
use crate::error::{Error, Result};
use crate::numeric::{abs, fmt_complex, ComplexJson, QContext};
use crate::series::{exponent_order, GenSeries, MultiIndex, SeriesJson};

/// One monomial `coeff * z^{k . alpha} * prod_j (sigma^j psi)^{p_j}` of `M`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub k: MultiIndex,
    pub p: Vec<u32>,
    pub coeff: Complex,
    /// `k . alpha`, kept for reporting.
    pub exponent: Complex,
}

impl Monomial {
    pub fn p_degree(&self) -> u32 {
        self.p.iter().sum()
    }
}

#[derive(Clone, Debug)]
pub struct ReducedEquation {
    lambda: Complex,
    alpha: Complex,
    l_coeffs: Vec<Complex>,
    generators: Vec<Complex>,
    monomials: Vec<Monomial>,
    phi0: GenSeries,
}

/// Polynomial in `u_0..u_n` with generalized-series coefficients.
type UPoly = BTreeMap<Vec<u32>, GenSeries>;

impl ReducedEquation {
    /// Assembles a reduced equation from its parts (used by fixtures and JSON input).
    pub fn from_parts(
        lambda: Complex,
        alpha: Complex,
        l_coeffs: Vec<Complex>,
        generators: Vec<Complex>,
        monomials: Vec<Monomial>,
        phi0: GenSeries,
    ) -> Result<Self> {
        if l_coeffs.iter().all(|a| a.real().is_zero() && a.imag().is_zero()) {
            return Err(Error::AllLeadingZero);
        }
        for g in &generators {
            if !(g.real().is_sign_positive() && !g.real().is_zero()) {
                return Err(Error::Domain(format!("generator {} must have Re > 0", fmt_complex(g, 12))));
            }
        }
        let s = generators.len();
        let n1 = l_coeffs.len();
        for m in &monomials {
            if m.k.arity() != s || m.p.len() != n1 {
                return Err(Error::Malformed("monomial shape does not match the equation".into()));
            }
            if m.k.degree() == 0 && m.p_degree() < 2 {
                return Err(Error::Malformed("monomial with k = 0 must be at least quadratic in psi".into()));
            }
        }
        Ok(ReducedEquation {
            lambda,
            alpha,
            l_coeffs,
            generators,
            monomials,
            phi0,
        })
    }

    pub fn lambda(&self) -> &Complex {
        &self.lambda
    }

    pub fn alpha(&self) -> &Complex {
        &self.alpha
    }

    /// `A_0, ..., A_n`.
    pub fn l_coeffs(&self) -> &[Complex] {
        &self.l_coeffs
    }

    pub fn generators(&self) -> &[Complex] {
        &self.generators
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn phi0(&self) -> &GenSeries {
        &self.phi0
    }

    pub fn order(&self) -> usize {
        self.l_coeffs.len() - 1
    }

    pub fn arity(&self) -> usize {
        self.generators.len()
    }

    /// `q_i = q^{alpha_i}`.
    pub fn generator_powers(&self, ctx: &QContext) -> Result<Vec<Complex>> {
        self.generators.iter().map(|g| ctx.power(g)).collect()
    }

    pub fn to_json(&self, ctx: &QContext) -> ReducedJson {
        ReducedJson {
            q: ComplexJson::from_complex(ctx.q()),
            precision_bits: ctx.precision_bits(),
            lambda: ComplexJson::from_complex(&self.lambda),
            alpha: ComplexJson::from_complex(&self.alpha),
            l_coeffs: self.l_coeffs.iter().map(ComplexJson::from_complex).collect(),
            generators: self.generators.iter().map(ComplexJson::from_complex).collect(),
            monomials: self
                .monomials
                .iter()
                .map(|m| MonomialJson {
                    k: m.k.entries().to_vec(),
                    p: m.p.clone(),
                    coeff: ComplexJson::from_complex(&m.coeff),
                    exponent: ComplexJson::from_complex(&m.exponent),
                })
                .collect(),
            phi0: self.phi0.to_json(),
        }
    }

    /// Rebuilds the equation and its context from [`ReducedJson`].
    pub fn from_json(json: &ReducedJson, precision_bits: Option<u32>) -> Result<(Self, QContext)> {
        let prec = precision_bits.unwrap_or(json.precision_bits);
        let ctx = QContext::new(json.q.to_complex(prec)?, prec)?;
        let c = |v: &ComplexJson| v.to_complex(prec);
        let generators = json.generators.iter().map(c).collect::<Result<Vec<_>>>()?;
        let monomials = json
            .monomials
            .iter()
            .map(|m| {
                Ok(Monomial {
                    k: MultiIndex::new(m.k.clone()),
                    p: m.p.clone(),
                    coeff: c(&m.coeff)?,
                    exponent: c(&m.exponent)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let phi0 = GenSeries::from_json(&json.phi0, &ctx, f64::INFINITY)?;
        let red = Self::from_parts(
            c(&json.lambda)?,
            c(&json.alpha)?,
            json.l_coeffs.iter().map(c).collect::<Result<Vec<_>>>()?,
            generators,
            monomials,
            phi0,
        )?;
        Ok((red, ctx))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonomialJson {
    pub k: Vec<u32>,
    pub p: Vec<u32>,
    pub coeff: ComplexJson,
    pub exponent: ComplexJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReducedJson {
    pub q: ComplexJson,
    pub precision_bits: u32,
    pub lambda: ComplexJson,
    pub alpha: ComplexJson,
    pub l_coeffs: Vec<ComplexJson>,
    pub generators: Vec<ComplexJson>,
    pub monomials: Vec<MonomialJson>,
    pub phi0: SeriesJson,
}

/// Expands `F(z, phi0 + z^lambda u_0, sigma phi0 + q^lambda z^lambda u_1, ...)`
/// in powers of `u`, reads `alpha` and `A_k` from the leading term of the
/// linear part and divides the rest by `z^{lambda + alpha}`.
pub fn reduce(eq: &QDiffEquation, phi0: &GenSeries, lambda: &Complex, ctx: &QContext) -> Result<ReducedEquation> {
    let prec = ctx.precision_bits();
    let n = eq.order();
    let inf = f64::INFINITY;
    match phi0.leading() {
        Some(t) if !(t.coeff.real().is_zero() && t.coeff.imag().is_zero()) => {}
        _ => return Err(Error::Domain("initial part phi0 must have a nonzero leading term".into())),
    }
    let phi0 = phi0.with_truncation(inf);

    // sigma^k phi0 and the factor q^{k lambda} z^lambda multiplying u_k
    let mut shifted = Vec::with_capacity(n + 1);
    let mut prefactor = Vec::with_capacity(n + 1);
    for k in 0..=n {
        shifted.push(phi0.dilate(k as u32, ctx)?);
        let klambda = Complex::with_val(prec, lambda * k as u32);
        prefactor.push(GenSeries::monomial(ctx, lambda.clone(), ctx.power(&klambda)?, inf));
    }

    let mut poly: UPoly = BTreeMap::new();
    for term in eq.terms() {
        let mut acc: UPoly = BTreeMap::new();
        acc.insert(
            vec![0; n + 1],
            GenSeries::monomial(ctx, term.z_exponent.clone(), term.coeff.clone(), inf),
        );
        for (k, &d) in term.powers.iter().enumerate() {
            if d == 0 {
                continue;
            }
            let factor = binomial_expansion(&shifted[k], &prefactor[k], k, d, n, ctx);
            acc = upoly_mul(&acc, &factor);
        }
        for (p, s) in acc {
            let merged = match poly.remove(&p) {
                Some(existing) => existing.add(&s),
                None => s,
            };
            poly.insert(p, merged);
        }
    }
    poly.retain(|_, s| !s.is_empty());

    // leading exponent of the linear part
    let unit = |k: usize| {
        let mut p = vec![0u32; n + 1];
        p[k] = 1;
        p
    };
    let mut lead: Option<Complex> = None;
    for k in 0..=n {
        if let Some(t) = poly.get(&unit(k)).and_then(|s| s.leading()) {
            match &lead {
                Some(e) if exponent_order(&t.exponent, e) != std::cmp::Ordering::Less => {}
                _ => lead = Some(t.exponent.clone()),
            }
        }
    }
    let lead = lead.ok_or(Error::AllLeadingZero)?;
    let lead_re = lead.real().to_f64();
    let alpha = Complex::with_val(prec, &lead - lambda);

    let mut l_coeffs = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let a = match poly.get(&unit(k)) {
            Some(s) => {
                if let Some(t) = s.leading() {
                    if t.exponent.real().to_f64() <= lead_re + 1e-12 && !ctx.approx_eq(&t.exponent, &lead) {
                        return Err(Error::InconsistentInitialPart(format!(
                            "linear part has two leading exponents {} and {} with equal real part",
                            fmt_complex(&lead, 10),
                            fmt_complex(&t.exponent, 10)
                        )));
                    }
                }
                match s.coeff_at(&lead) {
                    Some(c) => {
                        let klambda = Complex::with_val(prec, lambda * k as u32);
                        Complex::with_val(prec, c / ctx.power(&klambda)?)
                    }
                    None => ctx.zero(),
                }
            }
            None => ctx.zero(),
        };
        l_coeffs.push(a);
    }

    if let Some(free) = poly.get(&vec![0; n + 1]) {
        if let Some(t) = free.terms().iter().find(|t| t.exponent.real().to_f64() <= lead_re + 1e-12) {
            return Err(Error::InconsistentInitialPart(format!(
                "phi0 leaves the term {} z^({}) at or below the leading exponent {}",
                fmt_complex(&t.coeff, 10),
                fmt_complex(&t.exponent, 10),
                fmt_complex(&lead, 10)
            )));
        }
    }

    // everything else, moved to the right-hand side and divided by z^{lambda+alpha}
    let mut raw: Vec<(Vec<u32>, Complex, Complex)> = Vec::new();
    for (p, s) in &poly {
        let degree: u32 = p.iter().sum();
        for t in s.terms() {
            if degree == 1 && ctx.approx_eq(&t.exponent, &lead) {
                continue;
            }
            let beta = Complex::with_val(prec, &t.exponent - &lead);
            let coeff = Complex::with_val(prec, -&t.coeff);
            let beta_is_zero = ctx.approx_eq(&beta, &ctx.zero());
            let positive = beta.real().is_sign_positive() && beta.real().to_f64() > 1e-12;
            if !(positive || (beta_is_zero && degree >= 2)) {
                return Err(Error::InconsistentInitialPart(format!(
                    "term of degree {degree} in u at z^({}) lies at or below the leading exponent",
                    fmt_complex(&t.exponent, 10)
                )));
            }
            raw.push((p.clone(), if beta_is_zero { ctx.zero() } else { beta }, coeff));
        }
    }
    let positive: Vec<Complex> = raw
        .iter()
        .filter(|(_, b, _)| !(b.real().is_zero() && b.imag().is_zero()))
        .map(|(_, b, _)| b.clone())
        .collect();
    let (generators, _) = if positive.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        derive_generators(&positive, ctx)?
    };
    let s = generators.len();
    let mut table: BTreeMap<(MultiIndex, Vec<u32>), Monomial> = BTreeMap::new();
    for (p, beta, coeff) in raw {
        let k = if beta.real().is_zero() && beta.imag().is_zero() {
            MultiIndex::zero(s)
        } else {
            represent(&beta, &generators, ctx).ok_or_else(|| Error::NotRepresentable {
                exponent: fmt_complex(&beta, 12),
                bound: COMBINATION_BOUND,
            })?
        };
        let key = (k.clone(), p.clone());
        match table.get_mut(&key) {
            Some(m) => m.coeff += &coeff,
            None => {
                table.insert(
                    key,
                    Monomial {
                        exponent: k.weight(&generators, prec),
                        k,
                        p,
                        coeff,
                    },
                );
            }
        }
    }
    let monomials = table
        .into_values()
        .filter(|m| !(abs(&m.coeff).is_zero()))
        .collect();

    ReducedEquation::from_parts(lambda.clone(), alpha, l_coeffs, generators, monomials, phi0)
}

/// `(a + b u_k)^d = sum_i C(d, i) a^{d-i} b^i u_k^i`.
fn binomial_expansion(a: &GenSeries, b: &GenSeries, k: usize, d: u32, n: usize, ctx: &QContext) -> UPoly {
    let mut out = BTreeMap::new();
    let mut binom = rug::Integer::from(1);
    for i in 0..=d {
        let mut p = vec![0u32; n + 1];
        p[k] = i;
        let c = Complex::with_val(ctx.precision_bits(), &binom);
        let s = a.pow(d - i).mul(&b.pow(i)).scale(&c);
        if !s.is_empty() {
            out.insert(p, s);
        }
        binom = binom * (d - i) / (i + 1);
    }
    out
}

fn upoly_mul(x: &UPoly, y: &UPoly) -> UPoly {
    let mut out: UPoly = BTreeMap::new();
    for (px, sx) in x {
        for (py, sy) in y {
            let p: Vec<u32> = px.iter().zip(py).map(|(a, b)| a + b).collect();
            let prod = sx.mul(sy);
            let merged = match out.remove(&p) {
                Some(existing) => existing.add(&prod),
                None => prod,
            };
            out.insert(p, merged);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn parse(text: &str, ctx: &QContext) -> QDiffEquation {
        QDiffEquation::parse(text, ctx, &HashMap::new()).unwrap()
    }

    #[test]
    fn exact_linear_solution_gives_empty_m() {
        let ctx = QContext::new(Complex::with_val(192, 3), 192).unwrap();
        let eq = parse("sigma[y] - 2*y - z = 0", &ctx);
        let phi0 = GenSeries::monomial(&ctx, ctx.one(), ctx.one(), f64::INFINITY);
        let red = reduce(&eq, &phi0, &ctx.one(), &ctx).unwrap();
        assert_eq!(red.l_coeffs(), &[ctx.complex(-2.0, 0.0), ctx.one()]);
        assert!(red.alpha().real().is_zero() && red.alpha().imag().is_zero());
        assert!(red.monomials().is_empty());
        assert!(red.generators().is_empty());
    }

    #[test]
    fn inconsistent_initial_part_is_reported() {
        let ctx = QContext::new(Complex::with_val(192, 3), 192).unwrap();
        let eq = parse("sigma[y] - 2*y - 1 = 0", &ctx);
        let phi0 = GenSeries::monomial(&ctx, ctx.one(), ctx.one(), f64::INFINITY);
        let err = reduce(&eq, &phi0, &ctx.one(), &ctx).unwrap_err();
        assert!(matches!(err, Error::InconsistentInitialPart(_)));
        assert!(err.is_hypothesis_violation());
    }

    #[test]
    fn synthetic_instance() {
        let ctx = QContext::new(Complex::with_val(192, 2), 192).unwrap();
        let eq = parse("sigma[y] - 3*y - z - y^2 = 0", &ctx);
        let phi0 = GenSeries::monomial(&ctx, ctx.one(), ctx.complex(-1.0, 0.0), f64::INFINITY);
        let red = reduce(&eq, &phi0, &ctx.one(), &ctx).unwrap();
        assert_eq!(red.generators(), &[ctx.one()]);
        assert_eq!(red.l_coeffs(), &[ctx.complex(-3.0, 0.0), ctx.one()]);
        let c = classify_case(&red, &ctx).unwrap();
        assert_eq!(c.case, Case::B);
        assert_eq!(c.label, "case (b)");
    }
}
