//! Generalized power series `sum c_j z^{lambda_j}` with complex exponents.
//!
//! A [`GenSeries`] is a finite, strictly sorted list of terms together with a
//! bound on the real part of the exponents: every exponent with
//! `Re <= truncation_re` is represented, larger ones have been discarded.

mod multi;
mod subst;

pub use multi::{project_to_z, project_to_z_with_bound, MIndexSeries, MultiIndex, MultiIndexSpace};
pub use subst::{residual, substitute, substitute_abs, Residual};

use std::cmp::Ordering;

use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numeric::{abs, ComplexJson, QContext};

/// Slack applied when comparing a real part against a truncation bound.
const TRUNCATION_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub exponent: Complex,
    pub coeff: Complex,
}

impl Term {
    pub fn new(exponent: Complex, coeff: Complex) -> Self {
        Term { exponent, coeff }
    }
}

#[derive(Clone, Debug)]
pub struct GenSeries {
    terms: Vec<Term>,
    truncation_re: f64,
    precision_bits: u32,
    guard_bits: u32,
}

/// How coefficient sums that cancel are treated when terms are merged.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cancellation {
    /// Drop sums below `threshold * largest contribution`.
    Prune,
    /// Keep every nonzero sum; used when the cancellation itself is measured.
    Keep,
}

struct Pending {
    exponent: Complex,
    coeff: Complex,
    scale: Float,
}

impl GenSeries {
    pub fn zero(ctx: &QContext, truncation_re: f64) -> Self {
        GenSeries {
            terms: Vec::new(),
            truncation_re,
            precision_bits: ctx.precision_bits(),
            guard_bits: ctx.guard_bits(),
        }
    }

    pub fn one(ctx: &QContext, truncation_re: f64) -> Self {
        Self::monomial(ctx, ctx.zero(), ctx.one(), truncation_re)
    }

    pub fn monomial(ctx: &QContext, exponent: Complex, coeff: Complex, truncation_re: f64) -> Self {
        Self::from_terms(ctx, vec![Term::new(exponent, coeff)], truncation_re)
    }

    /// Builds a normalized series from arbitrary terms (merging duplicates).
    pub fn from_terms(ctx: &QContext, terms: Vec<Term>, truncation_re: f64) -> Self {
        let mut s = Self::zero(ctx, truncation_re);
        let raw = terms
            .into_iter()
            .map(|t| {
                let scale = abs(&t.coeff);
                (t, scale)
            })
            .collect();
        s.terms = s.merge(raw, Cancellation::Prune);
        s
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn truncation_re(&self) -> f64 {
        self.truncation_re
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn leading(&self) -> Option<&Term> {
        self.terms.first()
    }

    /// Coefficient of `z^exponent`, if present.
    pub fn coeff_at(&self, exponent: &Complex) -> Option<&Complex> {
        self.terms
            .iter()
            .find(|t| self.same_exponent(&t.exponent, exponent))
            .map(|t| &t.coeff)
    }

    pub fn with_truncation(&self, truncation_re: f64) -> Self {
        let bound = truncation_re.min(self.truncation_re);
        let mut out = self.clone();
        out.truncation_re = bound;
        out.terms.retain(|t| within(&t.exponent, bound));
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_with(other, Cancellation::Prune)
    }

    pub fn add_with(&self, other: &Self, mode: Cancellation) -> Self {
        let bound = self.truncation_re.min(other.truncation_re);
        let raw = self
            .terms
            .iter()
            .chain(other.terms.iter())
            .map(|t| (t.clone(), abs(&t.coeff)))
            .collect();
        self.build(raw, bound, mode)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coeff = Complex::with_val(self.precision_bits, -&t.coeff);
        }
        out
    }

    pub fn scale(&self, c: &Complex) -> Self {
        let raw = self
            .terms
            .iter()
            .map(|t| {
                let coeff = Complex::with_val(self.precision_bits, &t.coeff * c);
                let scale = abs(&coeff);
                (Term::new(t.exponent.clone(), coeff), scale)
            })
            .collect();
        self.build(raw, self.truncation_re, Cancellation::Keep)
    }

    /// Multiplication by `z^e`; the truncation bound moves with the exponents.
    pub fn shift(&self, e: &Complex) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.exponent = Complex::with_val(self.precision_bits, &t.exponent + e);
        }
        out.truncation_re = self.truncation_re + e.real().to_f64();
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_with(other, Cancellation::Prune)
    }

    /// Cauchy product. Pairs are enumerated in sorted order, so the result
    /// does not depend on anything but the operands.
    pub fn mul_with(&self, other: &Self, mode: Cancellation) -> Self {
        let bound = self.truncation_re.min(other.truncation_re);
        let prec = self.precision_bits;
        let mut raw = Vec::new();
        for a in &self.terms {
            let a_re = a.exponent.real().to_f64();
            for b in &other.terms {
                if a_re + b.exponent.real().to_f64() > bound + TRUNCATION_SLACK {
                    break;
                }
                let exponent = Complex::with_val(prec, &a.exponent + &b.exponent);
                let coeff = Complex::with_val(prec, &a.coeff * &b.coeff);
                let scale = abs(&coeff);
                raw.push((Term::new(exponent, coeff), scale));
            }
        }
        self.build(raw, bound, mode)
    }

    pub fn pow(&self, k: u32) -> Self {
        self.pow_with(k, Cancellation::Prune)
    }

    pub fn pow_with(&self, k: u32, mode: Cancellation) -> Self {
        let mut acc = GenSeries {
            terms: Vec::new(),
            truncation_re: self.truncation_re,
            precision_bits: self.precision_bits,
            guard_bits: self.guard_bits,
        };
        acc.terms.push(Term::new(
            Complex::new(self.precision_bits),
            Complex::with_val(self.precision_bits, 1),
        ));
        for _ in 0..k {
            acc = acc.mul_with(self, mode);
        }
        acc
    }

    /// `sigma^j`: multiplies the coefficient of `z^lambda` by `q^(j lambda)`.
    pub fn dilate(&self, j: u32, ctx: &QContext) -> Result<Self> {
        if j == 0 {
            return Ok(self.clone());
        }
        let mut out = self.clone();
        for t in &mut out.terms {
            let e = Complex::with_val(self.precision_bits, &t.exponent * j);
            let factor = ctx.power(&e)?;
            t.coeff = Complex::with_val(self.precision_bits, &t.coeff * &factor);
        }
        Ok(out)
    }

    /// Same exponents, coefficients replaced by their moduli.
    pub fn abs_coeffs(&self) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coeff = Complex::with_val(self.precision_bits, abs(&t.coeff));
        }
        out
    }

    /// Largest `|c|` over terms with `Re exponent <= bound`.
    pub fn max_abs_up_to(&self, bound: f64) -> Float {
        let mut best = Float::new(self.precision_bits);
        for t in self.terms.iter().filter(|t| within(&t.exponent, bound)) {
            let a = abs(&t.coeff);
            if a > best {
                best = a;
            }
        }
        best
    }

    fn threshold(&self) -> Float {
        let exp = -((self.precision_bits - self.guard_bits) as i32);
        Float::with_val(self.precision_bits, Float::i_exp(1, exp))
    }

    fn same_exponent(&self, a: &Complex, b: &Complex) -> bool {
        let diff = abs(&Complex::with_val(self.precision_bits, a - b));
        let mut scale = abs(a);
        if scale < 1 {
            scale = Float::with_val(self.precision_bits, 1);
        }
        diff <= Float::with_val(self.precision_bits, self.threshold() * &scale)
    }

    fn build(&self, raw: Vec<(Term, Float)>, bound: f64, mode: Cancellation) -> Self {
        let mut out = GenSeries {
            terms: Vec::new(),
            truncation_re: bound,
            precision_bits: self.precision_bits,
            guard_bits: self.guard_bits,
        };
        out.terms = out.merge(raw, mode);
        out
    }

    /// Sorts by exact `(Re, Im)`, merges exponents closer than the threshold
    /// and drops zero (or cancelled) coefficients and terms beyond the bound.
    fn merge(&self, mut raw: Vec<(Term, Float)>, mode: Cancellation) -> Vec<Term> {
        raw.retain(|(t, _)| within(&t.exponent, self.truncation_re));
        raw.sort_by(|a, b| exponent_order(&a.0.exponent, &b.0.exponent));
        let thr = self.threshold();
        let mut groups: Vec<Pending> = Vec::with_capacity(raw.len());
        for (term, scale) in raw {
            let mut target = None;
            for (idx, g) in groups.iter().enumerate().rev() {
                let gap = Float::with_val(self.precision_bits, term.exponent.real() - g.exponent.real());
                let mut reach = abs(&g.exponent);
                if reach < 1 {
                    reach = Float::with_val(self.precision_bits, 1);
                }
                if gap > Float::with_val(self.precision_bits, &thr * &reach) {
                    break;
                }
                if self.same_exponent(&g.exponent, &term.exponent) {
                    target = Some(idx);
                    break;
                }
            }
            match target {
                Some(idx) => {
                    let g = &mut groups[idx];
                    g.coeff += &term.coeff;
                    if scale > g.scale {
                        g.scale = scale;
                    }
                }
                None => groups.push(Pending {
                    exponent: term.exponent,
                    coeff: term.coeff,
                    scale,
                }),
            }
        }
        groups
            .into_iter()
            .filter(|g| {
                if g.coeff.real().is_zero() && g.coeff.imag().is_zero() {
                    return false;
                }
                match mode {
                    Cancellation::Keep => true,
                    Cancellation::Prune => {
                        abs(&g.coeff) > Float::with_val(self.precision_bits, &thr * &g.scale)
                    }
                }
            })
            .map(|g| Term::new(g.exponent, g.coeff))
            .collect()
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            lambda: None,
            terms: self
                .terms
                .iter()
                .map(|t| SeriesTermJson {
                    exponent: Some(ComplexJson::from_complex(&t.exponent)),
                    mindex: None,
                    coeff: ComplexJson::from_complex(&t.coeff),
                })
                .collect(),
            precision_bits: self.precision_bits,
        }
    }

    pub fn from_json(json: &SeriesJson, ctx: &QContext, truncation_re: f64) -> Result<Self> {
        let mut terms = Vec::with_capacity(json.terms.len());
        for t in &json.terms {
            let exponent = match &t.exponent {
                Some(e) => e.to_complex(ctx.precision_bits())?,
                None => {
                    return Err(crate::error::Error::Malformed(
                        "univariate series term without exponent".into(),
                    ))
                }
            };
            terms.push(Term::new(exponent, t.coeff.to_complex(ctx.precision_bits())?));
        }
        Ok(Self::from_terms(ctx, terms, truncation_re))
    }
}

fn within(e: &Complex, bound: f64) -> bool {
    e.real().to_f64() <= bound + TRUNCATION_SLACK
}

/// `(Re, Im)` lexicographic order on exponents.
pub fn exponent_order(a: &Complex, b: &Complex) -> Ordering {
    a.real()
        .partial_cmp(b.real())
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.imag().partial_cmp(b.imag()).unwrap_or(Ordering::Equal))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesTermJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<ComplexJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mindex: Option<Vec<u32>>,
    pub coeff: ComplexJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<ComplexJson>,
    pub terms: Vec<SeriesTermJson>,
    pub precision_bits: u32,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::float::Constant;

    fn ctx() -> QContext {
        QContext::new(Complex::with_val(192, 2), 192).unwrap()
    }

    fn ex1_ctx() -> QContext {
        let prec = 192;
        let pi = Float::with_val(prec, Constant::Pi);
        let h = Float::with_val(prec, Float::with_val(prec, 2).sqrt() / 2u32) * &pi;
        let q = Complex::with_val(prec, (-h.clone(), h)).exp();
        QContext::new(q, prec).unwrap()
    }

    fn mono(ctx: &QContext, re: f64, im: f64, c: f64, t: f64) -> GenSeries {
        GenSeries::monomial(ctx, ctx.complex(re, im), ctx.complex(c, 0.0), t)
    }

    fn assert_sorted(s: &GenSeries) {
        for w in s.terms().windows(2) {
            assert_eq!(exponent_order(&w[0].exponent, &w[1].exponent), Ordering::Less);
        }
        for t in s.terms() {
            assert!(!(t.coeff.real().is_zero() && t.coeff.imag().is_zero()));
            assert!(within(&t.exponent, s.truncation_re()));
        }
    }

    #[test]
    fn sum_examples() {
        let c = ctx();
        let a = mono(&c, 0.0, 1.0, 1.0, 10.0);
        let zero = GenSeries::zero(&c, 10.0);
        let s = a.add(&zero);
        assert_eq!(s.terms(), a.terms());

        let twice = a.add(&a);
        assert_eq!(twice.len(), 1);
        assert_eq!(twice.terms()[0].coeff, c.complex(2.0, 0.0));

        let diff = mono(&c, 1.0, 1.0, 1.0, 10.0).add(&mono(&c, 1.0, -1.0, -1.0, 10.0));
        let s = diff.add(&mono(&c, 1.0, -1.0, 1.0, 10.0));
        assert_eq!(s.len(), 1);
        assert_eq!(s.terms()[0].exponent, c.complex(1.0, 1.0));
    }

    #[test]
    fn sum_truncates_to_smaller_bound() {
        let c = ctx();
        let a = mono(&c, 3.0, 0.0, 1.0, 5.0);
        let b = mono(&c, 1.0, 0.0, 1.0, 2.0);
        let s = a.add(&b);
        assert_eq!(s.truncation_re(), 2.0);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn product_examples() {
        let c = ctx();
        let a = mono(&c, 1.0, 1.0, 1.0, 10.0);
        let one = GenSeries::one(&c, 10.0);
        assert_eq!(a.mul(&one).terms(), a.terms());

        let p = a.mul(&mono(&c, 1.0, -1.0, 1.0, 10.0));
        assert_eq!(p.len(), 1);
        assert_eq!(p.terms()[0].exponent, c.complex(2.0, 0.0));

        // (c00 + z^{1+i})^2
        let c00 = c.complex(0.5, 0.0);
        let base = GenSeries::monomial(&c, c.zero(), c00.clone(), 10.0).add(&a);
        let sq = base.pow(2);
        assert_eq!(sq.len(), 3);
        assert_eq!(sq.terms()[0].coeff, c.complex(0.25, 0.0));
        assert_eq!(sq.terms()[1].exponent, c.complex(1.0, 1.0));
        assert_eq!(sq.terms()[1].coeff, c.complex(1.0, 0.0));
        assert_eq!(sq.terms()[2].exponent, c.complex(2.0, 2.0));
        assert_eq!(sq.terms()[2].coeff, c.complex(1.0, 0.0));
    }

    #[test]
    fn product_drops_terms_beyond_bound() {
        let c = ctx();
        let a = mono(&c, 1.0, 0.0, 1.0, 1.5).add(&mono(&c, 0.0, 0.0, 1.0, 1.5));
        let p = a.mul(&a);
        assert_eq!(p.len(), 2);
        assert_eq!(p.truncation_re(), 1.5);
    }

    #[test]
    fn dilate_examples() {
        let c = ex1_ctx();
        let s = mono(&c, 0.0, 1.0, 1.0, 10.0);
        assert_eq!(s.dilate(0, &c).unwrap().terms(), s.terms());
        let d = s.dilate(1, &c).unwrap();
        let prec = 192;
        let h = Float::with_val(prec, Float::with_val(prec, 2).sqrt() / 2u32) * c.pi();
        let want = Complex::with_val(prec, (-h.clone(), -h)).exp();
        assert!(c.approx_eq(&d.terms()[0].coeff, &want));
        let d2 = s.dilate(2, &c).unwrap();
        let sq = Complex::with_val(prec, want.square_ref());
        assert!(c.approx_eq(&d2.terms()[0].coeff, &sq));
    }

    #[test]
    fn shift_moves_bound() {
        let c = ctx();
        let s = mono(&c, 1.0, 0.0, 1.0, 4.0).shift(&c.complex(0.5, 2.0));
        assert_eq!(s.truncation_re(), 4.5);
        assert_eq!(s.terms()[0].exponent, c.complex(1.5, 2.0));
    }

    #[test]
    fn json_round_trip() {
        let c = ex1_ctx();
        let s = mono(&c, 0.0, 1.0, 1.0, 10.0).dilate(1, &c).unwrap();
        let back = GenSeries::from_json(&s.to_json(), &c, 10.0).unwrap();
        assert_eq!(back.terms(), s.terms());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn series(c: &QContext, raw: &[(u8, i8, f64, f64)], bound: f64) -> GenSeries {
            let terms = raw
                .iter()
                .map(|&(re, im, cr, ci)| Term::new(c.complex(re as f64 * 0.5, im as f64 * 0.5), c.complex(cr, ci)))
                .collect();
            GenSeries::from_terms(c, terms, bound)
        }

        fn close(c: &QContext, a: &GenSeries, b: &GenSeries) -> bool {
            // compare a - b in keep mode against the sizes of a and b
            let diff = a.add_with(&b.neg(), Cancellation::Keep);
            let scale = a.max_abs_up_to(f64::INFINITY).max(&b.max_abs_up_to(f64::INFINITY));
            let scale = scale.max(&Float::with_val(192, 1));
            let tol = Float::with_val(192, Float::i_exp(1, -150)) * scale;
            diff.terms().iter().all(|t| abs(&t.coeff) <= tol) && c.precision_bits() == 192
        }

        fn terms() -> impl Strategy<Value = Vec<(u8, i8, f64, f64)>> {
            prop::collection::vec((0u8..8, -4i8..4, -3.0f64..3.0, -3.0f64..3.0), 0..6)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn dilation_is_a_ring_homomorphism(a in terms(), b in terms(), j in 0u32..3) {
                let c = ex1_ctx();
                let a = series(&c, &a, 3.0);
                let b = series(&c, &b, 3.0);
                let lhs = a.mul(&b).dilate(j, &c).unwrap();
                let rhs = a.dilate(j, &c).unwrap().mul(&b.dilate(j, &c).unwrap());
                prop_assert!(close(&c, &lhs, &rhs));
            }

            #[test]
            fn product_commutes_and_associates(a in terms(), b in terms(), d in terms()) {
                let c = ctx();
                let (a, b, d) = (series(&c, &a, 3.0), series(&c, &b, 3.0), series(&c, &d, 3.0));
                prop_assert!(close(&c, &a.mul(&b), &b.mul(&a)));
                prop_assert!(close(&c, &a.mul(&b).mul(&d), &a.mul(&b.mul(&d))));
                prop_assert!(close(&c, &a.add(&b).add(&d), &a.add(&b.add(&d))));
            }

            #[test]
            fn results_stay_sorted(a in terms(), b in terms()) {
                let c = ctx();
                let (a, b) = (series(&c, &a, 2.5), series(&c, &b, 3.0));
                assert_sorted(&a);
                assert_sorted(&a.add(&b));
                assert_sorted(&a.mul(&b));
                assert_sorted(&a.pow(3));
            }
        }
    }
}
