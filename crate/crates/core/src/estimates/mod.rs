//! Numerical checks of the estimate chain behind the convergence proof.
//!
//! With `x_m = q^lambda q^{m.alpha}` and a root `a` of `L`,
//! `eps_m(a) = |x_m - a|^{-1}` and `s_m = max(1, |q^{m.alpha}|)`. The pairwise
//! bound, the chain product bound, its `n`-th power form over all roots and
//! the exponential bound on `s_m^n delta_m` are evaluated on explicit
//! instances; every comparison is recorded with its ratio `lhs / rhs`.

mod combinatorial;
mod sampling;

pub use combinatorial::{admissible_count, verify_combinatorial, COMBINATORIAL_LIMIT};
pub use sampling::{random_chains, random_pairs};

use rug::ops::Pow;
use rug::{Complex, Float};
use serde::Serialize;

use crate::divisors::{multiplicative_exponent, scan_smalldiv, DivisorSetup};
use crate::error::{Error, Result};
use crate::numeric::{abs, QContext};
use crate::reduction::{classify_case, effective_degree, horner, polynomial_roots, Placement, ReducedEquation};
use crate::series::{MultiIndex, MultiIndexSpace};
use crate::solver::DeltaTable;

#[derive(Clone, Debug, Serialize)]
pub struct EstimateFailure {
    pub instance: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimateReport {
    pub check: String,
    /// Exponent the bounds were evaluated with; absent for exponent-free checks.
    pub nu: Option<f64>,
    pub checked: usize,
    /// Largest `lhs / rhs` seen; below 1 means every instance held.
    pub worst_slack: f64,
    pub worst_instance: Option<String>,
    pub failures: Vec<EstimateFailure>,
    pub notes: Vec<String>,
}

impl EstimateReport {
    pub fn new(check: &str, nu: Option<f64>) -> Self {
        EstimateReport {
            check: check.to_string(),
            nu,
            checked: 0,
            worst_slack: 0.0,
            worst_instance: None,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Records `lhs <= rhs`. Ratios within `tolerance` of 1 count as equality.
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // a NaN must land on the failing side
    pub fn record(&mut self, instance: impl FnOnce() -> String, lhs: &Float, rhs: &Float, tolerance: f64) {
        self.checked += 1;
        let ratio = if rhs.is_zero() {
            if lhs.is_zero() {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            Float::with_val(lhs.prec().max(64), lhs / rhs).to_f64()
        };
        let worse = ratio > self.worst_slack || (ratio.is_nan() && !self.worst_slack.is_nan());
        let label = (worse || !(ratio <= 1.0 + tolerance)).then(instance);
        if worse {
            self.worst_slack = ratio;
            self.worst_instance = label.clone();
        }
        if !(ratio <= 1.0 + tolerance) {
            self.failures.push(EstimateFailure {
                instance: label.unwrap_or_default(),
                lhs: lhs.to_f64(),
                rhs: rhs.to_f64(),
                ratio,
            });
        }
    }

    /// Folds another report in, keeping this report's name and exponent.
    pub fn absorb(&mut self, other: EstimateReport) {
        self.checked += other.checked;
        if other.worst_slack > self.worst_slack {
            self.worst_slack = other.worst_slack;
            self.worst_instance = other.worst_instance;
        }
        self.failures.extend(other.failures);
        self.notes.extend(other.notes);
    }
}

/// Which relaxations of the hypotheses the generator placement allows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EstimateMode {
    /// All `|q_i| >= 1`: a zero root of `L` may enter the bounds.
    pub zero_root_allowed: bool,
    /// All `|q_i| <= 1`: `s_m = 1`, so `deg L < n` is harmless.
    pub low_degree_allowed: bool,
}

impl EstimateMode {
    pub fn from_placements(placements: &[Placement]) -> Self {
        EstimateMode {
            zero_root_allowed: placements.iter().all(|p| *p != Placement::Inside),
            low_degree_allowed: placements.iter().all(|p| *p != Placement::Outside),
        }
    }

    pub fn of(red: &ReducedEquation, ctx: &QContext) -> Result<Self> {
        Ok(Self::from_placements(&classify_case(red, ctx)?.placements))
    }
}

/// Precomputed `x_m` and `s_m` for every multi-index up to a degree.
pub struct EstimateTables {
    space: MultiIndexSpace,
    x: Vec<Vec<Complex>>,
    s: Vec<Vec<Float>>,
    q_lambda: Complex,
    prec: u32,
    tolerance: f64,
}

impl EstimateTables {
    pub fn new(red: &ReducedEquation, ctx: &QContext, max_degree: u32) -> Result<Self> {
        let prec = ctx.precision_bits();
        let space = MultiIndexSpace::new(red.arity(), max_degree);
        let q_lambda = ctx.power(red.lambda())?;
        let mut x = Vec::new();
        let mut s = Vec::new();
        for d in 0..=max_degree {
            let mut xl = Vec::new();
            let mut sl = Vec::new();
            for m in space.level(d) {
                let qm = ctx.power(&m.weight(red.generators(), prec))?;
                sl.push(abs(&qm).max(&Float::with_val(prec, 1)));
                xl.push(Complex::with_val(prec, &q_lambda * &qm));
            }
            x.push(xl);
            s.push(sl);
        }
        Ok(EstimateTables {
            space,
            x,
            s,
            q_lambda,
            prec,
            tolerance: ctx.threshold().to_f64(),
        })
    }

    pub fn max_degree(&self) -> u32 {
        self.space.max_degree()
    }

    fn at<'t, T>(&self, table: &'t [Vec<T>], m: &MultiIndex) -> Result<&'t T> {
        let rank = self
            .space
            .rank(m)
            .ok_or_else(|| Error::Guardrail(format!("{m} beyond the tabulated degree {}", self.max_degree())))?;
        Ok(&table[m.degree() as usize][rank])
    }

    pub fn x(&self, m: &MultiIndex) -> Result<&Complex> {
        self.at(&self.x, m)
    }

    pub fn s(&self, m: &MultiIndex) -> Result<&Float> {
        self.at(&self.s, m)
    }

    /// `eps_m(a)`, infinite when `x_m = a`.
    pub fn eps(&self, m: &MultiIndex, a: &Complex) -> Result<Float> {
        let gap = abs(&Complex::with_val(self.prec, self.x(m)? - a));
        Ok(Float::with_val(self.prec, gap.recip_ref()))
    }

    pub fn q_lambda(&self) -> &Complex {
        &self.q_lambda
    }
}

/// The exponent implied by the divisor scan up to `max_degree`: the fitted
/// additive exponent, raised until every multiplicative distance of the
/// scan, and `|q^{-m} - 1|`, is at least `(2 |m|)^{-nu}`.
pub fn scan_exponent(red: &ReducedEquation, ctx: &QContext, max_degree: u32) -> Result<f64> {
    let setup = DivisorSetup::from_reduced(red, ctx)?;
    let report = scan_smalldiv(&setup, ctx, max_degree)?;
    let mut nu = 0.0f64;
    for scan in &report.roots {
        if let Some(fit) = &scan.fit {
            nu = nu.max(fit.nu);
        }
        let pick = |f: fn(&crate::divisors::Sample) -> &Float| -> Vec<(u64, Float)> {
            scan.samples.iter().map(|s| (s.degree() as u64, f(s).clone())).collect()
        };
        nu = multiplicative_exponent(&pick(|s| &s.mult_shift), nu);
        nu = multiplicative_exponent(&pick(|s| &s.mult_inverse), nu);
        nu = multiplicative_exponent(&pick(|s| &s.mult_unit), nu);
    }
    let prec = ctx.precision_bits();
    let space = MultiIndexSpace::new(red.arity(), max_degree);
    let mut unit_inverse = Vec::new();
    for m in space.nonzero() {
        let qm = ctx.power(&m.weight(red.generators(), prec))?;
        let gap = Complex::with_val(prec, Complex::with_val(prec, qm.recip_ref()) - 1u32);
        unit_inverse.push((m.degree() as u64, abs(&gap)));
    }
    Ok(multiplicative_exponent(&unit_inverse, nu))
}

/// Raises a scan exponent to one the pairwise bound is proved with: the
/// factors `1 / |a|` and `1 / |q^lambda|` are absorbed into `2^{nu}`.
/// Zero roots contribute nothing (they only occur when all `|q_i| >= 1`).
pub fn lemma_exponent(scan_nu: f64, roots: &[Complex], q_lambda: &Complex) -> f64 {
    let mut bump = 0.0f64;
    let lift = |z: &Complex| -> f64 {
        let m = abs(z).to_f64();
        if m > 0.0 {
            (-m.log2()).max(0.0)
        } else {
            0.0
        }
    };
    bump = bump.max(lift(q_lambda));
    for a in roots {
        bump = bump.max(lift(a));
    }
    scan_nu + bump
}

fn pow_f(base: f64, exponent: f64, prec: u32) -> Float {
    Float::with_val(prec, base).pow(Float::with_val(prec, exponent))
}

fn is_zero(z: &Complex) -> bool {
    z.real().is_zero() && z.imag().is_zero()
}

fn check_root(a: &Complex, mode: EstimateMode) -> Result<()> {
    if is_zero(a) && !mode.zero_root_allowed {
        return Err(Error::ZeroRoot);
    }
    Ok(())
}

/// Pairwise bound: for `m > p`,
/// `s_m min(eps_m(a), eps_p(a)) < 2^{nu+1} (|m| - |p|)^nu` and the same with `s_p`.
pub fn verify_lemma1(
    tables: &EstimateTables,
    a: &Complex,
    pairs: &[(MultiIndex, MultiIndex)],
    nu: f64,
    mode: EstimateMode,
) -> Result<EstimateReport> {
    check_root(a, mode)?;
    let prec = tables.prec;
    let mut report = EstimateReport::new("lemma1", Some(nu));
    for (m, p) in pairs {
        if !m.succeeds(p) {
            return Err(Error::Malformed(format!("pair {m} > {p} is not ordered")));
        }
        let em = tables.eps(m, a)?;
        let ep = tables.eps(p, a)?;
        let small = if em < ep { em } else { ep };
        let gap = (m.degree() - p.degree()) as f64;
        let rhs = Float::with_val(prec, pow_f(2.0, nu + 1.0, prec) * pow_f(gap, nu, prec));
        for (side, s) in [("s_m", tables.s(m)?), ("s_p", tables.s(p)?)] {
            let lhs = Float::with_val(prec, s * &small);
            report.record(|| format!("{side}: m = {m}, p = {p}"), &lhs, &rhs, tables.tolerance);
        }
    }
    Ok(report)
}

fn check_chain(chain: &[MultiIndex]) -> Result<()> {
    if chain.is_empty() {
        return Err(Error::Malformed("empty chain".into()));
    }
    for w in chain.windows(2) {
        if !w[0].succeeds(&w[1]) {
            return Err(Error::Malformed(format!("chain not decreasing at {} > {}", w[0], w[1])));
        }
    }
    if chain.last().is_some_and(|m| m.degree() == 0) {
        return Err(Error::Malformed("chain must end above 0".into()));
    }
    Ok(())
}

/// `|m^0|^nu prod_{i >= 1} (|m^{i-1}| - |m^i|)^nu`.
fn chain_gaps(chain: &[MultiIndex], nu: f64, prec: u32) -> Float {
    let mut out = pow_f(chain[0].degree() as f64, nu, prec);
    for w in chain.windows(2) {
        out *= pow_f((w[0].degree() - w[1].degree()) as f64, nu, prec);
    }
    out
}

/// Chain products for one root `a`:
/// `prod s_{m^i} eps_{m^i}(a) < N_1^{r+1} |m^0|^nu prod (|m^{i-1}| - |m^i|)^nu`.
pub fn verify_lemma2(
    tables: &EstimateTables,
    a: &Complex,
    chains: &[Vec<MultiIndex>],
    nu: f64,
    mode: EstimateMode,
) -> Result<EstimateReport> {
    check_root(a, mode)?;
    let prec = tables.prec;
    let n1 = pow_f(2.0, 2.0 * nu + 1.0, prec);
    let mut report = EstimateReport::new("lemma2", Some(nu));
    for chain in chains {
        check_chain(chain)?;
        let mut lhs = Float::with_val(prec, 1);
        for m in chain {
            lhs *= Float::with_val(prec, tables.s(m)? * tables.eps(m, a)?);
        }
        let rhs = Float::with_val(prec, (&n1).pow(chain.len() as u32)) * chain_gaps(chain, nu, prec);
        report.record(|| format!("lemma2: {}", render_chain(chain)), &lhs, &rhs, tables.tolerance);
    }
    Ok(report)
}

/// The `n`-th power form over all roots of the monic `L`, together with the
/// factorization `prod_roots eps_m(a_i) = |A_d| / |L(x_m)|` behind it. Skipped,
/// with a note, unless `deg L = n` and `L(0) != 0` or the placement relaxes them.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // a NaN must land on the failing side
pub fn verify_power_form(
    red: &ReducedEquation,
    ctx: &QContext,
    tables: &EstimateTables,
    chains: &[Vec<MultiIndex>],
    nu: f64,
    mode: EstimateMode,
) -> Result<EstimateReport> {
    let prec = tables.prec;
    let n1 = pow_f(2.0, 2.0 * nu + 1.0, prec);
    let mut report = EstimateReport::new("corollary", Some(nu));
    let coeffs = red.l_coeffs();
    let degree = effective_degree(coeffs, ctx).unwrap_or(0);
    let n = red.order();
    let roots = polynomial_roots(&coeffs[..=degree], ctx)?;
    let has_zero_root = roots.iter().any(|r| is_zero(&r.value));
    let degree_ok = degree == n || mode.low_degree_allowed;
    let zero_ok = !has_zero_root || mode.zero_root_allowed;
    if !(degree_ok && zero_ok) {
        report.notes.push(format!(
            "power form skipped: deg L = {degree}, n = {n}, zero root = {has_zero_root}"
        ));
        return Ok(report);
    }
    if degree < n {
        report.notes.push(format!("power form with deg L = {degree} < n = {n}: s_m = 1 throughout"));
    }
    let lead = abs(&coeffs[degree]);
    let loose = Float::with_val(prec, Float::i_exp(1, -((prec / 2) as i32)));
    let mut identity_checked = 0;
    for chain in chains {
        check_chain(chain)?;
        let mut lhs = Float::with_val(prec, 1);
        for m in chain {
            let x = tables.x(m)?;
            let eps = Float::with_val(prec, &lead / abs(&horner(coeffs, x, prec)));
            let mut product = Float::with_val(prec, 1);
            for r in &roots {
                product *= Float::with_val(prec, tables.eps(m, &r.value)?.pow(r.multiplicity as u32));
            }
            let gap = Float::with_val(prec, Float::with_val(prec, &product - &eps).abs() / &eps);
            identity_checked += 1;
            if !(gap <= loose) {
                // identity residuals carry no slack information, only failures
                report.failures.push(EstimateFailure {
                    instance: format!("factorization at {m}"),
                    lhs: product.to_f64(),
                    rhs: eps.to_f64(),
                    ratio: gap.to_f64(),
                });
            }
            lhs *= Float::with_val(prec, tables.s(m)?.pow(n as u32)) * eps;
        }
        let base = Float::with_val(prec, (&n1).pow(chain.len() as u32)) * chain_gaps(chain, nu, prec);
        let rhs = base.pow(n as u32);
        report.record(|| format!("corollary: {}", render_chain(chain)), &lhs, &rhs, tables.tolerance);
    }
    report.checked += identity_checked;
    Ok(report)
}

/// [`verify_lemma2`] for `a` followed by [`verify_power_form`].
pub fn verify_chain(
    red: &ReducedEquation,
    ctx: &QContext,
    tables: &EstimateTables,
    a: &Complex,
    chains: &[Vec<MultiIndex>],
    nu: f64,
    mode: EstimateMode,
) -> Result<EstimateReport> {
    let mut report = verify_lemma2(tables, a, chains, nu, mode)?;
    report.absorb(verify_power_form(red, ctx, tables, chains, nu, mode)?);
    Ok(report)
}

/// `s_m^n delta_m <= |m|^{-2 nu n} N_2^{|m|-1} Q^{|m|}` with
/// `N_2 = 8^{nu n} N_1^n`, `N_1 = 2^{2 nu + 1}` and `Q = max(1, |q_i|^n)`.
pub fn verify_delta_bound(red: &ReducedEquation, ctx: &QContext, table: &DeltaTable, nu: f64) -> Result<EstimateReport> {
    let prec = ctx.precision_bits();
    let n = table.n;
    let nf = n as f64;
    let n1 = pow_f(2.0, 2.0 * nu + 1.0, prec);
    let n2 = Float::with_val(prec, pow_f(8.0, nu * nf, prec) * n1.pow(n));
    let mut q_max = Float::with_val(prec, 1);
    for qi in red.generator_powers(ctx)? {
        let v = abs(&qi).pow(n);
        if v > q_max {
            q_max = v;
        }
    }
    let mut report = EstimateReport::new("lemma3", Some(nu));
    let tolerance = ctx.threshold().to_f64();
    for (m, _) in table.delta.iter() {
        let d = m.degree();
        let lhs = table.weighted(m).expect("tabulated");
        let rhs = pow_f(d as f64, -2.0 * nu * nf, prec) * Float::with_val(prec, (&n2).pow(d - 1))
            * Float::with_val(prec, (&q_max).pow(d));
        report.record(|| format!("m = {m}"), &lhs, &rhs, tolerance);
    }
    Ok(report)
}

fn render_chain(chain: &[MultiIndex]) -> String {
    chain.iter().map(ToString::to_string).collect::<Vec<_>>().join(" > ")
}

/// Every check on one reduced equation, with pairs and chains drawn from a seed.
#[derive(Clone, Debug, Serialize)]
pub struct EstimateSuite {
    pub scan_nu: f64,
    pub nu: f64,
    pub mode: EstimateMode,
    pub reports: Vec<EstimateReport>,
}

impl EstimateSuite {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(EstimateReport::passed)
    }
}

/// Which parts of [`run_estimates`] to evaluate.
#[derive(Clone, Copy, Debug)]
pub struct EstimateRequest {
    pub lemma1: bool,
    pub chain: bool,
    pub delta: bool,
    pub max_degree: u32,
    /// Degree bound for the delta table, at most [`crate::solver::DELTA_DEGREE_LIMIT`].
    pub delta_degree: u32,
    pub samples: usize,
    pub max_chain_len: usize,
    pub seed: u64,
    /// Overrides the scan-derived exponent.
    pub nu: Option<f64>,
}

pub fn run_estimates(red: &ReducedEquation, ctx: &QContext, request: &EstimateRequest) -> Result<EstimateSuite> {
    let mode = EstimateMode::of(red, ctx)?;
    let tables = EstimateTables::new(red, ctx, request.max_degree)?;
    let roots: Vec<Complex> = polynomial_roots(red.l_coeffs(), ctx)?.into_iter().map(|r| r.value).collect();
    let scan_nu = match request.nu {
        Some(nu) => nu,
        None => scan_exponent(red, ctx, request.max_degree)?,
    };
    let nu = match request.nu {
        Some(nu) => nu,
        None => lemma_exponent(scan_nu, &roots, tables.q_lambda()),
    };
    let usable: Vec<&Complex> = roots.iter().filter(|a| !is_zero(a) || mode.zero_root_allowed).collect();
    let mut reports = Vec::new();
    if request.lemma1 {
        let pairs = random_pairs(red.arity(), request.max_degree, request.samples, request.seed);
        let mut report = EstimateReport::new("lemma1", Some(nu));
        for a in &usable {
            report.absorb(verify_lemma1(&tables, a, &pairs, nu, mode)?);
        }
        reports.push(report);
    }
    if request.chain {
        let chains = random_chains(red.arity(), request.max_degree, request.max_chain_len, request.samples, request.seed + 1);
        let mut report = EstimateReport::new("lemma2", Some(nu));
        for a in &usable {
            report.absorb(verify_lemma2(&tables, a, &chains, nu, mode)?);
        }
        reports.push(report);
        reports.push(verify_power_form(red, ctx, &tables, &chains, nu, mode)?);
    }
    if request.delta {
        let table = crate::solver::delta_sequence(red, ctx, request.delta_degree)?;
        reports.push(verify_delta_bound(red, ctx, &table, nu)?);
    }
    Ok(EstimateSuite {
        scan_nu,
        nu,
        mode,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn far_from_the_circle_the_pair_bound_is_a_constant_check() {
        let fx = fixtures::synthetic(128).unwrap();
        let red = fx.reduce().unwrap();
        let tables = EstimateTables::new(&red, &fx.ctx, 6).unwrap();
        let mode = EstimateMode::of(&red, &fx.ctx).unwrap();
        let a = Complex::with_val(128, 3);
        let pairs: Vec<_> = (1..6).map(|d| (mi(&[d + 1]), mi(&[d]))).collect();
        let report = verify_lemma1(&tables, &a, &pairs, 0.0, mode).unwrap();
        // q = 2, lambda = 1: x_m = 2^{m+1}, so eps stays below 1 while the bound is 2
        assert!(report.passed());
        assert_eq!(report.checked, 10);
        assert!(report.worst_slack < 1.0);
        let (m, p) = &pairs[0];
        let small = tables.eps(m, &a).unwrap().min(&tables.eps(p, &a).unwrap());
        let expected = Float::with_val(128, tables.s(p).unwrap() * &small).to_f64() / 2.0;
        assert!(report.worst_slack >= expected * (1.0 - 1e-12));
    }

    #[test]
    fn min_picks_the_far_member_of_an_adversarial_pair() {
        let fx = fixtures::ex2_default(192).unwrap();
        let red = fx.reduce().unwrap();
        let ctx = &fx.ctx;
        let tables = EstimateTables::new(&red, ctx, 12).unwrap();
        let mode = EstimateMode::of(&red, ctx).unwrap();
        let a = ctx.power(red.lambda()).unwrap();
        // the closest approach of x_m to the root on the tabulated range
        let space = MultiIndexSpace::new(red.arity(), 12);
        let worst = space
            .nonzero()
            .max_by(|u, v| tables.eps(u, &a).unwrap().partial_cmp(&tables.eps(v, &a).unwrap()).unwrap())
            .unwrap()
            .clone();
        let unit = MultiIndex::unit(red.arity(), 0);
        let p = worst.checked_sub(&unit).filter(|p| p.degree() > 0).unwrap_or_else(|| unit.clone());
        let pair = (worst.clone(), p.clone());
        let em = tables.eps(&worst, &a).unwrap();
        let ep = tables.eps(&p, &a).unwrap();
        assert!(em > ep);
        let roots = vec![a.clone()];
        let nu = lemma_exponent(scan_exponent(&red, ctx, 12).unwrap(), &roots, tables.q_lambda());
        let report = verify_lemma1(&tables, &a, &[pair], nu, mode).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn single_element_chains_follow_from_the_divisor_bounds() {
        let fx = fixtures::ex2_default(192).unwrap();
        let red = fx.reduce().unwrap();
        let ctx = &fx.ctx;
        let tables = EstimateTables::new(&red, ctx, 8).unwrap();
        let mode = EstimateMode::of(&red, ctx).unwrap();
        let a = ctx.power(red.lambda()).unwrap();
        let nu = scan_exponent(&red, ctx, 8).unwrap();
        let chains: Vec<Vec<MultiIndex>> = MultiIndexSpace::new(red.arity(), 8)
            .nonzero()
            .map(|m| vec![m.clone()])
            .collect();
        let report = verify_chain(&red, ctx, &tables, &a, &chains, nu, mode).unwrap();
        assert!(report.passed(), "{:?}", report.failures.first());
    }

    #[test]
    fn factorization_over_roots_reproduces_the_divisor() {
        let fx = fixtures::ex2_default(192).unwrap();
        let red = fx.reduce().unwrap();
        let ctx = &fx.ctx;
        let tables = EstimateTables::new(&red, ctx, 6).unwrap();
        let mode = EstimateMode::of(&red, ctx).unwrap();
        let a = ctx.power(red.lambda()).unwrap();
        let chains = random_chains(red.arity(), 6, 4, 40, 5);
        let report = verify_chain(&red, ctx, &tables, &a, &chains, 3.0, mode).unwrap();
        assert!(report.notes.is_empty(), "{:?}", report.notes);
        assert_eq!(report.checked, 40 * 2 + chains.iter().map(Vec::len).sum::<usize>());
        assert!(report.passed());
    }

    #[test]
    fn synthetic_chains_have_room_to_spare() {
        let fx = fixtures::synthetic(128).unwrap();
        let red = fx.reduce().unwrap();
        let ctx = &fx.ctx;
        let tables = EstimateTables::new(&red, ctx, 10).unwrap();
        let mode = EstimateMode::of(&red, ctx).unwrap();
        assert!(mode.zero_root_allowed && !mode.low_degree_allowed);
        let a = Complex::with_val(128, 3);
        let chains = random_chains(1, 10, 5, 50, 11);
        let report = verify_chain(&red, ctx, &tables, &a, &chains, 0.5, mode).unwrap();
        assert!(report.passed());
        // s_m eps_m(3) = 2^m / (2^{m+1} - 3) peaks at m = 1 with 2 against N_1 = 4
        assert!(report.worst_slack <= 0.5 + 1e-12, "{}", report.worst_slack);
    }

    #[test]
    fn unit_degree_delta_bound_is_q() {
        let fx = fixtures::synthetic(128).unwrap();
        let red = fx.reduce().unwrap();
        let table = crate::solver::delta_sequence(&red, &fx.ctx, 1).unwrap();
        let report = verify_delta_bound(&red, &fx.ctx, &table, 1.0).unwrap();
        // s_1 = |q| = 2 = Q for n = 1: equality
        assert_eq!(report.checked, 1);
        assert!(report.passed());
        assert!((report.worst_slack - 1.0).abs() < 1e-30);
    }

    #[test]
    fn delta_bound_on_the_synthetic_instance() {
        let fx = fixtures::synthetic(128).unwrap();
        let red = fx.reduce().unwrap();
        let table = crate::solver::delta_sequence(&red, &fx.ctx, 8).unwrap();
        let report = verify_delta_bound(&red, &fx.ctx, &table, 0.5).unwrap();
        assert_eq!(report.checked, 8);
        assert!(report.passed(), "{:?}", report.failures);
    }

    #[test]
    fn zero_root_needs_the_outside_placement() {
        let fx = fixtures::ex2_default(128).unwrap();
        let red = fx.reduce().unwrap();
        let tables = EstimateTables::new(&red, &fx.ctx, 3).unwrap();
        let mode = EstimateMode::of(&red, &fx.ctx).unwrap();
        let zero = Complex::new(128);
        let got = verify_lemma1(&tables, &zero, &[], 1.0, mode);
        if mode.zero_root_allowed {
            assert!(got.is_ok());
        } else {
            assert!(matches!(got, Err(Error::ZeroRoot)));
        }
        let outside = EstimateMode::from_placements(&[Placement::Outside, Placement::On]);
        assert!(verify_lemma1(&tables, &zero, &[], 1.0, outside).is_ok());
    }

    #[test]
    fn unordered_pairs_are_rejected() {
        let fx = fixtures::synthetic(128).unwrap();
        let red = fx.reduce().unwrap();
        let tables = EstimateTables::new(&red, &fx.ctx, 3).unwrap();
        let mode = EstimateMode::of(&red, &fx.ctx).unwrap();
        let a = Complex::with_val(128, 3);
        let bad = [(mi(&[1]), mi(&[2]))];
        assert!(matches!(verify_lemma1(&tables, &a, &bad, 1.0, mode), Err(Error::Malformed(_))));
    }

    #[test]
    fn lemma_exponent_absorbs_small_roots() {
        let one = Complex::with_val(64, 1);
        let quarter = Complex::with_val(64, 0.25);
        assert_eq!(lemma_exponent(1.5, std::slice::from_ref(&one), &one), 1.5);
        assert!((lemma_exponent(1.5, &[quarter], &one) - 3.5).abs() < 1e-12);
        assert_eq!(lemma_exponent(1.5, &[Complex::new(64)], &one), 1.5);
    }
}
