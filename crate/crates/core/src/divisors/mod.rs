//! Distances governing the small divisors `L(q^lambda q^m)`.
//!
//! For a root `a` of `(xi - q^lambda) L(xi)` and a multi-index `m` the additive
//! distance is `min_k |(lambda + m.alpha) ln q - ln a - 2 pi i k|`; next to it
//! the scan records the three multiplicative distances
//! `|q^lambda q^m - a|`, `|a q^{-m} - q^lambda|` and `|q^m - 1|`.

mod cf;
mod fit;
mod liouville;

pub use cf::{bruno_siegel, cf_expand, cf_expand_with, BrjunoReport, CFExpansion, CFExpansionJson};
pub use fit::{fit_diophantine, fit_points, multiplicative_exponent, DiophantineFit, DEFAULT_NU_CAP, MIN_FIT_SAMPLES};
pub use liouville::{liouville_case, LiouvilleCase, LIOUVILLE_MAX_N};

use rayon::prelude::*;
use rug::{Complex, Float, Integer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixtures::Ex3;
use crate::numeric::{abs, fixed_log, lattice_distance, ComplexJson, QContext};
use crate::reduction::{polynomial_roots, ReducedEquation};
use crate::series::{MultiIndex, MultiIndexSpace};

/// What a scan needs: `lambda`, the generators and the roots to test.
#[derive(Clone, Debug)]
pub struct DivisorSetup {
    pub lambda: Complex,
    pub generators: Vec<Complex>,
    pub roots: Vec<ScanRoot>,
    /// Zero roots of `L` left out because `ln 0` is undefined.
    pub skipped_zero_roots: usize,
}

#[derive(Clone, Debug)]
pub struct ScanRoot {
    pub value: Complex,
    pub is_q_lambda: bool,
}

impl DivisorSetup {
    /// `q^lambda` together with the distinct nonzero roots of `L`.
    pub fn from_reduced(red: &ReducedEquation, ctx: &QContext) -> Result<Self> {
        let mut skipped = 0;
        let mut values = Vec::new();
        for r in polynomial_roots(red.l_coeffs(), ctx)? {
            if r.value.real().is_zero() && r.value.imag().is_zero() {
                skipped += r.multiplicity;
            } else {
                values.push(r.value);
            }
        }
        let mut setup = Self::with_roots(red.lambda().clone(), red.generators().to_vec(), values, ctx)?;
        setup.skipped_zero_roots = skipped;
        Ok(setup)
    }

    /// The third example: generators `1, 4 ell, 1 + i`, `lambda = 0`.
    pub fn from_ex3(ex3: &Ex3) -> Result<Self> {
        Self::with_roots(ex3.lambda.clone(), ex3.generators.clone(), ex3.roots.clone(), &ex3.ctx)
    }

    /// Explicit roots; `q^lambda` is added when not already among them.
    pub fn with_roots(lambda: Complex, generators: Vec<Complex>, roots: Vec<Complex>, ctx: &QContext) -> Result<Self> {
        let q_lambda = ctx.power(&lambda)?;
        let mut out: Vec<ScanRoot> = vec![ScanRoot {
            value: q_lambda.clone(),
            is_q_lambda: true,
        }];
        for a in roots {
            if a.real().is_zero() && a.imag().is_zero() {
                return Err(Error::ZeroRoot);
            }
            if !out.iter().any(|r| ctx.approx_eq(&r.value, &a)) {
                out.push(ScanRoot {
                    value: a,
                    is_q_lambda: false,
                });
            }
        }
        Ok(DivisorSetup {
            lambda,
            generators,
            roots: out,
            skipped_zero_roots: 0,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub m: MultiIndex,
    /// The integer `k` realizing the additive distance.
    pub k: Integer,
    pub distance: Float,
    /// `|q^lambda q^m - a|`
    pub mult_shift: Float,
    /// `|a q^{-m} - q^lambda|`
    pub mult_inverse: Float,
    /// `|q^m - 1|`
    pub mult_unit: Float,
}

impl Sample {
    pub fn degree(&self) -> u32 {
        self.m.degree()
    }
}

#[derive(Clone, Debug)]
pub struct RootScan {
    pub root: Complex,
    pub is_q_lambda: bool,
    pub samples: Vec<Sample>,
    pub fit: Option<DiophantineFit>,
}

impl RootScan {
    /// The sample with the smallest `distance * |m|`.
    pub fn worst(&self) -> Option<&Sample> {
        self.samples.iter().min_by(|a, b| {
            let sa = Float::with_val(a.distance.prec(), &a.distance * a.degree());
            let sb = Float::with_val(b.distance.prec(), &b.distance * b.degree());
            sa.partial_cmp(&sb).unwrap_or(std::cmp::Ordering::Equal)
        })
    }

    /// `(|m|, distance)` pairs for fitting.
    pub fn points(&self) -> Vec<(u64, Float)> {
        self.samples.iter().map(|s| (s.degree() as u64, s.distance.clone())).collect()
    }
}

#[derive(Clone, Debug)]
pub struct DivisorReport {
    pub max_degree: u32,
    pub roots: Vec<RootScan>,
    pub skipped_zero_roots: usize,
}

/// Scans every `1 <= |m| <= max_degree` against every root of the setup and
/// fits a `(c, nu)` envelope per root when enough samples are available.
pub fn scan_smalldiv(setup: &DivisorSetup, ctx: &QContext, max_degree: u32) -> Result<DivisorReport> {
    let space = MultiIndexSpace::new(setup.generators.len(), max_degree);
    let indices: Vec<MultiIndex> = space.nonzero().cloned().collect();
    let mut roots = Vec::with_capacity(setup.roots.len());
    for root in &setup.roots {
        let samples = indices
            .par_iter()
            .map(|m| sample(setup, &root.value, m, ctx))
            .collect::<Result<Vec<_>>>()?;
        let mut scan = RootScan {
            root: root.value.clone(),
            is_q_lambda: root.is_q_lambda,
            samples,
            fit: None,
        };
        if scan.samples.len() >= MIN_FIT_SAMPLES {
            scan.fit = Some(fit_diophantine(&scan.points(), DEFAULT_NU_CAP)?);
        }
        roots.push(scan);
    }
    Ok(DivisorReport {
        max_degree,
        roots,
        skipped_zero_roots: setup.skipped_zero_roots,
    })
}

/// Samples along the ray `t * direction` for the given multipliers `t`.
pub fn scan_ray(
    setup: &DivisorSetup,
    root: &Complex,
    direction: &MultiIndex,
    multipliers: &[u64],
    ctx: &QContext,
) -> Result<Vec<(u64, Float, Integer)>> {
    let prec = ctx.precision_bits();
    let step = Complex::with_val(prec, direction.weight(&setup.generators, prec));
    let ln_a = fixed_log(root)?;
    multipliers
        .par_iter()
        .map(|&t| {
            let e = Complex::with_val(prec, &setup.lambda + Complex::with_val(prec, &step * Integer::from(t)));
            let w = Complex::with_val(prec, Complex::with_val(prec, &e * ctx.fixed_log()) - &ln_a);
            let (d, k) = lattice_distance(&w);
            Ok((t * direction.degree() as u64, d, k))
        })
        .collect()
}

fn sample(setup: &DivisorSetup, a: &Complex, m: &MultiIndex, ctx: &QContext) -> Result<Sample> {
    let prec = ctx.precision_bits();
    let weight = m.weight(&setup.generators, prec);
    let e = Complex::with_val(prec, &setup.lambda + &weight);
    let w = Complex::with_val(prec, Complex::with_val(prec, &e * ctx.fixed_log()) - fixed_log(a)?);
    let (distance, k) = lattice_distance(&w);

    let q_lambda = ctx.power(&setup.lambda)?;
    let q_m = ctx.power(&weight)?;
    let q_minus_m = ctx.power(&Complex::with_val(prec, -&weight))?;
    let shift = Complex::with_val(prec, Complex::with_val(prec, &q_lambda * &q_m) - a);
    let inverse = Complex::with_val(prec, Complex::with_val(prec, a * &q_minus_m) - &q_lambda);
    let unit = Complex::with_val(prec, &q_m - 1u32);
    Ok(Sample {
        m: m.clone(),
        k,
        distance,
        mult_shift: abs(&shift),
        mult_inverse: abs(&inverse),
        mult_unit: abs(&unit),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleJson {
    pub m: Vec<u32>,
    pub degree: u32,
    pub k: String,
    pub distance: String,
    pub mult_shift: String,
    pub mult_inverse: String,
    pub mult_unit: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RootScanJson {
    pub root: ComplexJson,
    pub is_q_lambda: bool,
    pub fit: Option<DiophantineFit>,
    pub worst: Option<SampleJson>,
    pub samples: Vec<SampleJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DivisorReportJson {
    pub max_degree: u32,
    pub skipped_zero_roots: usize,
    pub roots: Vec<RootScanJson>,
}

impl Sample {
    pub fn to_json(&self) -> SampleJson {
        let f = |x: &Float| x.to_string_radix(10, Some(20));
        SampleJson {
            m: self.m.entries().to_vec(),
            degree: self.degree(),
            k: self.k.to_string(),
            distance: f(&self.distance),
            mult_shift: f(&self.mult_shift),
            mult_inverse: f(&self.mult_inverse),
            mult_unit: f(&self.mult_unit),
        }
    }
}

impl DivisorReport {
    pub fn to_json(&self) -> DivisorReportJson {
        DivisorReportJson {
            max_degree: self.max_degree,
            skipped_zero_roots: self.skipped_zero_roots,
            roots: self
                .roots
                .iter()
                .map(|r| RootScanJson {
                    root: ComplexJson::from_complex(&r.root),
                    is_q_lambda: r.is_q_lambda,
                    fit: r.fit.clone(),
                    worst: r.worst().map(Sample::to_json),
                    samples: r.samples.iter().map(Sample::to_json).collect(),
                })
                .collect(),
        }
    }
}
