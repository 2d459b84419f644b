//! Multi-indices and s-variate truncated Taylor series.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use rug::{Complex, Float};

use super::{GenSeries, Term};
use crate::numeric::{ComplexJson, QContext};
use crate::series::{SeriesJson, SeriesTermJson};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zero(s: usize) -> Self {
        MultiIndex(vec![0; s])
    }

    pub fn unit(s: usize, i: usize) -> Self {
        let mut e = vec![0; s];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Componentwise `self >= other`.
    pub fn dominates(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    /// The partial order of the estimates: componentwise `>=` and strictly larger degree.
    pub fn succeeds(&self, other: &MultiIndex) -> bool {
        self.dominates(other) && self.degree() > other.degree()
    }

    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if !self.dominates(other) {
            return None;
        }
        Some(MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `sum m_i alpha_i`.
    pub fn weight(&self, generators: &[Complex], prec: u32) -> Complex {
        let mut acc = Complex::new(prec);
        for (m, g) in self.0.iter().zip(generators) {
            if *m > 0 {
                acc += Complex::with_val(prec, g * *m);
            }
        }
        acc
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, ")")
    }
}

/// All multi-indices of arity `s` up to a degree, grouped by degree in
/// lexicographic order, with a reverse lookup to `(degree, rank)`.
#[derive(Clone, Debug)]
pub struct MultiIndexSpace {
    arity: usize,
    by_degree: Vec<Vec<MultiIndex>>,
    rank: HashMap<MultiIndex, usize>,
}

impl MultiIndexSpace {
    pub fn new(arity: usize, max_degree: u32) -> Self {
        let mut by_degree = Vec::with_capacity(max_degree as usize + 1);
        let mut rank = HashMap::new();
        for d in 0..=max_degree {
            let mut level = Vec::new();
            let mut current = vec![0u32; arity];
            compositions(d, 0, &mut current, &mut level);
            level.sort();
            for (i, m) in level.iter().enumerate() {
                rank.insert(m.clone(), i);
            }
            by_degree.push(level);
        }
        MultiIndexSpace {
            arity,
            by_degree,
            rank,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn max_degree(&self) -> u32 {
        self.by_degree.len() as u32 - 1
    }

    pub fn level(&self, degree: u32) -> &[MultiIndex] {
        &self.by_degree[degree as usize]
    }

    pub fn rank(&self, m: &MultiIndex) -> Option<usize> {
        if m.degree() > self.max_degree() {
            return None;
        }
        self.rank.get(m).copied()
    }

    /// Every index with `1 <= |m| <= max_degree`, degree-major.
    pub fn nonzero(&self) -> impl Iterator<Item = &MultiIndex> {
        self.by_degree.iter().skip(1).flatten()
    }
}

fn compositions(remaining: u32, pos: usize, current: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex(current.clone()));
        return;
    }
    if current.is_empty() {
        return;
    }
    for v in 0..=remaining {
        current[pos] = v;
        compositions(remaining - v, pos + 1, current, out);
    }
    current[pos] = 0;
}

/// `m -> c_m` for `1 <= |m| <= max_degree`, iterated degree-major.
#[derive(Clone, Debug)]
pub struct MIndexSeries<T> {
    arity: usize,
    max_degree: u32,
    coeffs: BTreeMap<MultiIndex, T>,
}

impl<T> MIndexSeries<T> {
    pub fn new(arity: usize, max_degree: u32) -> Self {
        MIndexSeries {
            arity,
            max_degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    /// Stores `c_m`; indices outside `1..=max_degree` are ignored.
    pub fn insert(&mut self, m: MultiIndex, value: T) {
        let d = m.degree();
        assert_eq!(m.arity(), self.arity, "multi-index arity mismatch");
        if d >= 1 && d <= self.max_degree {
            self.coeffs.insert(m, value);
        }
    }

    pub fn get(&self, m: &MultiIndex) -> Option<&T> {
        self.coeffs.get(m)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &T)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn of_degree(&self, d: u32) -> impl Iterator<Item = (&MultiIndex, &T)> {
        self.coeffs.iter().filter(move |(m, _)| m.degree() == d)
    }
}

impl MIndexSeries<Complex> {
    pub fn to_json(&self, lambda: Option<&Complex>, precision_bits: u32) -> SeriesJson {
        SeriesJson {
            lambda: lambda.map(ComplexJson::from_complex),
            terms: self
                .coeffs
                .iter()
                .map(|(m, c)| SeriesTermJson {
                    exponent: None,
                    mindex: Some(m.entries().to_vec()),
                    coeff: ComplexJson::from_complex(c),
                })
                .collect(),
            precision_bits,
        }
    }
}

impl MIndexSeries<Float> {
    pub fn to_json(&self, precision_bits: u32) -> SeriesJson {
        SeriesJson {
            lambda: None,
            terms: self
                .coeffs
                .iter()
                .map(|(m, c)| SeriesTermJson {
                    exponent: None,
                    mindex: Some(m.entries().to_vec()),
                    coeff: ComplexJson::from_complex(&Complex::with_val(precision_bits, c)),
                })
                .collect(),
            precision_bits,
        }
    }
}

/// `z^lambda * sum c_m z^{m . alpha}` as a univariate series.
///
/// The bound `Re lambda + (D + 1/2) min Re alpha_i` keeps exactly the exponents
/// that no index of degree above `D` can reach. Indices sharing one complex
/// exponent have their coefficients summed.
pub fn project_to_z(
    psi: &MIndexSeries<Complex>,
    generators: &[Complex],
    lambda: &Complex,
    ctx: &QContext,
) -> GenSeries {
    let min_re = generators
        .iter()
        .map(|g| g.real().to_f64())
        .fold(f64::INFINITY, f64::min);
    let bound = lambda.real().to_f64() + (psi.max_degree() as f64 + 0.5) * min_re;
    project_to_z_with_bound(psi, generators, lambda, ctx, bound)
}

pub fn project_to_z_with_bound(
    psi: &MIndexSeries<Complex>,
    generators: &[Complex],
    lambda: &Complex,
    ctx: &QContext,
    truncation_re: f64,
) -> GenSeries {
    let prec = ctx.precision_bits();
    let terms = psi
        .iter()
        .map(|(m, c)| {
            let e = Complex::with_val(prec, lambda + m.weight(generators, prec));
            Term::new(e, c.clone())
        })
        .collect();
    GenSeries::from_terms(ctx, terms, truncation_re)
}
