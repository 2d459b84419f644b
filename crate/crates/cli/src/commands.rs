//! The subcommands proper. Each returns an [`Artifact`]; none prints.

use anyhow::{bail, Context};
use rug::{Complex, Float};
use serde_json::{json, Value};

use qdiff_core::divisors::{bruno_siegel, cf_expand_with, liouville_case, scan_smalldiv, DivisorSetup};
use qdiff_core::equation::parse_constant;
use qdiff_core::estimates::{run_estimates, verify_combinatorial, EstimateReport, EstimateRequest};
use qdiff_core::fixtures;
use qdiff_core::numeric::{abs, float_to_decimal, ComplexJson, QContext};
use qdiff_core::reduction::{classify_case, ReducedEquation};
use qdiff_core::series::MIndexSeries;
use qdiff_core::solver::{delta_sequence, growth_diagnostics, solve_coefficients, solve_majorant, DELTA_DEGREE_LIMIT};

use crate::inputs::{self, Loaded};
use crate::output::{Artifact, Table};
use crate::{EquationArgs, RunConfig};

fn cj(z: &Complex) -> ComplexJson {
    ComplexJson::from_complex(z)
}

pub fn reduce(cfg: &RunConfig, input: &EquationArgs) -> anyhow::Result<Artifact> {
    let Loaded { red, ctx, equation } = inputs::load(cfg, input)?;
    let classification = classify_case(&red, &ctx)?;
    let mut table = Table::new("reduce", vec!["k", "re_a_k", "im_a_k"]);
    for (k, a) in red.l_coeffs().iter().enumerate() {
        table.push(vec![k.to_string(), float_to_decimal(a.real()), float_to_decimal(a.imag())]);
    }
    let mut artifact = Artifact::new(
        "reduce",
        json!({
            "equation": equation.map(|e| e.render()),
            "reduced": red.to_json(&ctx),
            "classification": classification,
        }),
    );
    artifact.tables.push(table);
    Ok(artifact)
}

fn coefficient_table(name: &str, psi: &MIndexSeries<Complex>) -> Table {
    let mut table = Table::new(name, vec!["m", "degree", "re", "im", "abs"]);
    for (m, c) in psi.iter() {
        table.push(vec![
            m.to_string(),
            m.degree().to_string(),
            float_to_decimal(c.real()),
            float_to_decimal(c.imag()),
            float_to_decimal(&abs(c)),
        ]);
    }
    table
}

/// `M_d = max_{|m| = d} |c_m|` next to `ln M_d` and `M_d^{1/d}`.
fn growth_table(psi: &MIndexSeries<Complex>) -> (Table, Value) {
    let report = growth_diagnostics(psi);
    let mut table = Table::new("growth", vec!["degree", "M_d", "ln_M_d", "root_growth"]);
    for row in &report.rows {
        let max = psi
            .of_degree(row.degree)
            .map(|(_, c)| abs(c))
            .fold(None::<Float>, |acc, v| Some(acc.map_or(v.clone(), |a| a.max(&v))));
        table.push(vec![
            row.degree.to_string(),
            max.map(|m| float_to_decimal(&m)).unwrap_or_default(),
            row.ln_max.to_string(),
            row.root_growth.to_string(),
        ]);
    }
    (table, serde_json::to_value(report).unwrap_or(Value::Null))
}

/// The solved coefficients and their growth, shared by `solve` and `example`.
fn solved(red: &ReducedEquation, ctx: &QContext, degree: u32, table_name: &str) -> anyhow::Result<(Value, Value, Vec<Table>, MIndexSeries<Complex>)> {
    let psi = solve_coefficients(red, ctx, degree)?;
    let coeffs = serde_json::to_value(psi.to_json(Some(red.lambda()), ctx.precision_bits()))?;
    let (growth, growth_json) = growth_table(&psi);
    Ok((coeffs, growth_json, vec![coefficient_table(table_name, &psi), growth], psi))
}

pub fn solve(cfg: &RunConfig, input: &EquationArgs, majorant: bool, delta: bool, growth: bool) -> anyhow::Result<Artifact> {
    let Loaded { red, ctx, .. } = inputs::load(cfg, input)?;
    let prec = ctx.precision_bits();
    let (coeffs, growth_json, tables, psi) = solved(&red, &ctx, cfg.degree, "solve")?;
    let mut body = json!({ "max_degree": cfg.degree, "coefficients": coeffs });
    if growth {
        body["growth"] = growth_json;
    }
    let mut violation = false;
    if majorant {
        let maj = solve_majorant(&red, &ctx, cfg.degree)?;
        let mut section = json!({
            "nu_tilde": float_to_decimal(&maj.nu_tilde),
            "majorant": maj.c.to_json(prec),
        });
        if let Some(d) = &maj.delta {
            // the majorant dominates when |c_m| <= delta_m C_m everywhere
            let mut worst = 0.0f64;
            for (m, c) in psi.iter() {
                if let (Some(cm), Some(dm)) = (maj.c.get(m), d.get(m)) {
                    let bound = Float::with_val(prec, cm * dm);
                    if !bound.is_zero() {
                        worst = worst.max(Float::with_val(prec, abs(c) / bound).to_f64());
                    }
                }
            }
            violation |= worst > 1.0 + 1e-20;
            section["delta"] = serde_json::to_value(d.to_json(prec))?;
            section["max_domination_ratio"] = json!(worst);
        }
        body["majorant"] = section;
    }
    if delta {
        let deg = cfg.degree.min(DELTA_DEGREE_LIMIT);
        let table = delta_sequence(&red, &ctx, deg)?;
        body["delta"] = json!({
            "max_degree": deg,
            "n": table.n,
            "eps": table.eps.to_json(prec),
            "s": table.s.to_json(prec),
            "mu": table.mu.to_json(prec),
            "delta": table.delta.to_json(prec),
        });
    }
    Ok(Artifact {
        command: "solve",
        json: body,
        tables,
        violation,
    })
}

pub fn divisors(cfg: &RunConfig, input: &EquationArgs, example: Option<&str>, max_degree: u32, roots: &str) -> anyhow::Result<Artifact> {
    let prec = cfg.precision_bits;
    let (setup, ctx) = match example {
        Some("ex3") => {
            let ex3 = fixtures::ex3(prec)?;
            (DivisorSetup::from_ex3(&ex3)?, ex3.ctx)
        }
        Some(name) => {
            let fx = inputs::fixture(cfg, name, None, None, None)?;
            (DivisorSetup::from_reduced(&fx.reduce()?, &fx.ctx)?, fx.ctx)
        }
        None => {
            let Loaded { red, ctx, .. } = inputs::load(cfg, input)?;
            (DivisorSetup::from_reduced(&red, &ctx)?, ctx)
        }
    };
    let setup = if roots.trim() == "auto" {
        setup
    } else {
        let bindings = inputs::params(cfg)?;
        let values = roots
            .split(',')
            .map(|t| parse_constant(t, &ctx, &bindings).with_context(|| format!("root `{t}`")))
            .collect::<anyhow::Result<Vec<_>>>()?;
        DivisorSetup::with_roots(setup.lambda, setup.generators, values, &ctx)?
    };
    let report = scan_smalldiv(&setup, &ctx, max_degree)?;
    let mut table = Table::new(
        "divisors",
        vec!["root", "m", "degree", "k", "distance", "mult_shift", "mult_inverse", "mult_unit"],
    );
    for (i, scan) in report.roots.iter().enumerate() {
        for s in &scan.samples {
            let j = s.to_json();
            table.push(vec![
                i.to_string(),
                s.m.to_string(),
                j.degree.to_string(),
                j.k,
                j.distance,
                j.mult_shift,
                j.mult_inverse,
                j.mult_unit,
            ]);
        }
    }
    let violation = report.roots.iter().any(|r| r.fit.as_ref().is_some_and(|f| f.suspected_violation));
    Ok(Artifact {
        command: "divisors",
        json: json!({ "suspected_violation": violation, "report": report.to_json() }),
        tables: vec![table],
        violation,
    })
}

pub fn cf(cfg: &RunConfig, omega: &str, depth: usize) -> anyhow::Result<Artifact> {
    let eval = |prec: u32| -> qdiff_core::Result<Float> {
        let at = RunConfig {
            precision_bits: prec,
            ..cfg.clone()
        };
        inputs::real_constant(omega, &at).map_err(|e| qdiff_core::Error::Domain(format!("{e:#}")))
    };
    let expansion = cf_expand_with(eval, depth, cfg.precision_bits)?;
    let brjuno = bruno_siegel(&expansion)?;
    let mut table = Table::new(
        "cf",
        vec!["k", "a_k", "p_k", "q_k", "partial_sum", "cauchy_difference", "ratio"],
    );
    for (k, (a, (p, q))) in expansion.quotients.iter().zip(&expansion.convergents).enumerate() {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        table.push(vec![
            k.to_string(),
            a.to_string(),
            p.to_string(),
            q.to_string(),
            opt(brjuno.partial_sums.get(k).copied()),
            opt(brjuno.cauchy_differences.get(k).copied()),
            opt(brjuno.ratios.get(k).copied().flatten()),
        ]);
    }
    Ok(Artifact {
        command: "cf",
        json: json!({ "expansion": expansion.to_json(), "brjuno": brjuno }),
        tables: vec![table],
        violation: false,
    })
}

pub fn liouville(cfg: &RunConfig, n: u32) -> anyhow::Result<Artifact> {
    let case = liouville_case(n, cfg.precision_bits)?;
    let header = vec!["N", "p_tilde", "m_tilde", "residual", "tail", "bound", "below_bound"];
    let row = vec![
        case.n.to_string(),
        case.p_tilde.to_string(),
        case.m_tilde.to_string(),
        float_to_decimal(&case.residual),
        float_to_decimal(&case.tail),
        float_to_decimal(&case.bound),
        case.below_bound.to_string(),
    ];
    let body: serde_json::Map<String, Value> = header
        .iter()
        .zip(&row)
        .map(|(k, v)| (k.to_string(), json!(v)))
        .chain([
            ("below_bound".to_string(), json!(case.below_bound)),
            ("precision_bits".to_string(), json!(case.precision_bits)),
            ("working_bits".to_string(), json!(case.working_bits)),
        ])
        .collect();
    let mut table = Table::new("liouville", header);
    table.push(row);
    Ok(Artifact {
        command: "liouville",
        json: Value::Object(body),
        tables: vec![table],
        violation: false,
    })
}

pub struct VerifyOptions {
    pub nu: Option<f64>,
    pub lemmas: Vec<String>,
    pub max_degree: u32,
    pub samples: usize,
    pub chain_len: usize,
    pub seed: u64,
    pub comb_total: u32,
}

pub fn verify(cfg: &RunConfig, input: &EquationArgs, example: Option<&str>, opts: &VerifyOptions) -> anyhow::Result<Artifact> {
    let mut wanted = [false; 4];
    for lemma in &opts.lemmas {
        match lemma.trim() {
            "1" => wanted[0] = true,
            "2" => wanted[1] = true,
            "3" => wanted[2] = true,
            "comb" => wanted[3] = true,
            other => bail!("unknown check `{other}` (expected 1, 2, 3 or comb)"),
        }
    }
    let mut reports: Vec<EstimateReport> = Vec::new();
    let mut body = json!({});
    if wanted[..3].iter().any(|&w| w) {
        let (red, ctx) = match example {
            Some(name) => {
                let fx = inputs::fixture(cfg, name, None, None, None)?;
                (fx.reduce()?, fx.ctx)
            }
            None => {
                let Loaded { red, ctx, .. } = inputs::load(cfg, input)?;
                (red, ctx)
            }
        };
        let request = EstimateRequest {
            lemma1: wanted[0],
            chain: wanted[1],
            delta: wanted[2],
            max_degree: opts.max_degree,
            delta_degree: opts.max_degree.min(DELTA_DEGREE_LIMIT),
            samples: opts.samples,
            max_chain_len: opts.chain_len,
            seed: opts.seed,
            nu: opts.nu,
        };
        let suite = run_estimates(&red, &ctx, &request)?;
        body["scan_nu"] = json!(suite.scan_nu);
        body["nu"] = json!(suite.nu);
        body["mode"] = serde_json::to_value(suite.mode)?;
        reports.extend(suite.reports);
    }
    if wanted[3] {
        reports.push(verify_combinatorial(opts.comb_total)?);
    }
    let passed = reports.iter().all(EstimateReport::passed);
    let mut table = Table::new("verify", vec!["check", "checked", "failures", "worst_slack", "passed"]);
    for r in &reports {
        table.push(vec![
            r.check.clone(),
            r.checked.to_string(),
            r.failures.len().to_string(),
            r.worst_slack.to_string(),
            r.passed().to_string(),
        ]);
    }
    body["passed"] = json!(passed);
    body["reports"] = serde_json::to_value(&reports)?;
    Ok(Artifact {
        command: "verify",
        json: body,
        tables: vec![table],
        violation: !passed,
    })
}

pub fn example(cfg: &RunConfig, name: &str, c00: Option<&str>, omega: Option<&str>, r: Option<&str>) -> anyhow::Result<Artifact> {
    let prec = cfg.precision_bits;
    if name == "ex3" {
        // no initial part is known for this one, so it stops at the divisor data
        let ex3 = fixtures::ex3(prec)?;
        let list = |v: &[Complex]| v.iter().map(cj).collect::<Vec<_>>();
        return Ok(Artifact::new(
            "example",
            json!({
                "name": "ex3",
                "equation": ex3.equation.render(),
                "q": cj(ex3.ctx.q()),
                "ell": float_to_decimal(&ex3.ell),
                "l_coeffs": list(&ex3.l_coeffs),
                "roots": list(&ex3.roots),
                "generators": list(&ex3.generators),
                "lambda": cj(&ex3.lambda),
            }),
        ));
    }
    let fx = inputs::fixture(cfg, name, c00, omega, r)?;
    let red = fx.reduce()?;
    let classification = classify_case(&red, &fx.ctx)?;
    let (coeffs, growth, tables, _) = solved(&red, &fx.ctx, cfg.degree, "example")?;
    Ok(Artifact {
        command: "example",
        json: json!({
            "name": fx.name,
            "equation": fx.text,
            "q": cj(fx.ctx.q()),
            "lambda": cj(&fx.lambda),
            "phi0": fx.phi0.to_json(),
            "max_degree": cfg.degree,
            "classification": classification,
            "coefficients": coeffs,
            "growth": growth,
        }),
        tables,
        violation: false,
    })
}
