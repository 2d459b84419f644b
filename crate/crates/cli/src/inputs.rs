//! Turning command-line text into equations, contexts and constants.

use std::collections::HashMap;
use std::fs;

use anyhow::{anyhow, bail, Context};
use rug::{Complex, Float};

use qdiff_core::equation::{parse_constant, parse_series, QDiffEquation};
use qdiff_core::fixtures::{self, Fixture};
use qdiff_core::numeric::QContext;
use qdiff_core::reduction::{reduce, ReducedEquation, ReducedJson};

use crate::{EquationArgs, RunConfig};

/// A context for expressions that cannot mention `q`.
fn bare_context(prec: u32) -> anyhow::Result<QContext> {
    Ok(QContext::new(Complex::with_val(prec, 2), prec)?)
}

pub fn params(cfg: &RunConfig) -> anyhow::Result<HashMap<String, Complex>> {
    let ctx = bare_context(cfg.precision_bits)?;
    let mut out = HashMap::new();
    for binding in &cfg.params {
        let (name, value) = binding
            .split_once('=')
            .ok_or_else(|| anyhow!("--param expects NAME=VALUE, got `{binding}`"))?;
        let v = parse_constant(value, &ctx, &out).with_context(|| format!("--param {name}"))?;
        out.insert(name.trim().to_string(), v);
    }
    Ok(out)
}

/// A constant that may not depend on `q`.
pub fn constant(text: &str, cfg: &RunConfig) -> anyhow::Result<Complex> {
    let ctx = bare_context(cfg.precision_bits)?;
    Ok(parse_constant(text, &ctx, &params(cfg)?)?)
}

pub fn real_constant(text: &str, cfg: &RunConfig) -> anyhow::Result<Float> {
    let v = constant(text, cfg)?;
    if !v.imag().is_zero() {
        bail!("`{text}` is not real");
    }
    Ok(v.real().clone())
}

/// The reduced equation, its context and, when available, the equation itself.
pub struct Loaded {
    pub red: ReducedEquation,
    pub ctx: QContext,
    pub equation: Option<QDiffEquation>,
}

pub fn load(cfg: &RunConfig, input: &EquationArgs) -> anyhow::Result<Loaded> {
    if let Some(path) = &input.red {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        // either the bare reduction or the full `reduce` report around it
        let mut value: serde_json::Value =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if let Some(inner) = value.get_mut("reduced") {
            value = inner.take();
        }
        let json: ReducedJson = serde_json::from_value(value).with_context(|| format!("parsing {}", path.display()))?;
        let (red, ctx) = ReducedEquation::from_json(&json, Some(cfg.precision_bits))?;
        return Ok(Loaded {
            red,
            ctx,
            equation: None,
        });
    }
    let text = match (&input.eq, &input.eq_file) {
        (Some(t), _) => t.clone(),
        (None, Some(path)) => fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        (None, None) => bail!("an equation is required: --eq, --eq-file or --red"),
    };
    let q_text = input.q.as_deref().ok_or_else(|| anyhow!("--q is required with --eq"))?;
    let phi0_text = input.phi0.as_deref().ok_or_else(|| anyhow!("--phi0 is required with --eq"))?;
    let ctx = QContext::new(constant(q_text, cfg)?, cfg.precision_bits)?;
    let bindings = params(cfg)?;
    let equation = QDiffEquation::parse(text.trim(), &ctx, &bindings)?;
    let phi0 = parse_series(phi0_text, &ctx, &bindings)?;
    let lambda = match &input.lambda {
        Some(l) => parse_constant(l, &ctx, &bindings)?,
        None => {
            phi0.leading()
                .ok_or_else(|| anyhow!("--phi0 has no terms"))?
                .exponent
                .clone()
        }
    };
    let red = reduce(&equation, &phi0, &lambda, &ctx)?;
    Ok(Loaded {
        red,
        ctx,
        equation: Some(equation),
    })
}

/// A reducible example with its parameters taken from the flags, then from
/// `--param`, then from the defaults.
pub fn fixture(cfg: &RunConfig, name: &str, c00: Option<&str>, omega: Option<&str>, r: Option<&str>) -> anyhow::Result<Fixture> {
    let prec = cfg.precision_bits;
    let bound = params(cfg)?;
    let pick = |flag: Option<&str>, key: &str| -> anyhow::Result<Option<Complex>> {
        match flag {
            Some(t) => Ok(Some(constant(t, cfg)?)),
            None => Ok(bound.get(key).cloned()),
        }
    };
    match name {
        "ex1" => {
            let c00 = pick(c00, "c00")?.unwrap_or_else(|| Complex::with_val(prec, 0.5));
            Ok(fixtures::ex1(&c00, prec)?)
        }
        "ex2" => {
            let c00 = pick(c00, "c00")?.unwrap_or_else(|| Complex::with_val(prec, 1));
            let omega = match pick(omega, "omega")? {
                Some(w) if w.imag().is_zero() => w.real().clone(),
                Some(_) => bail!("omega must be real"),
                None => Float::with_val(prec, Float::with_val(prec, 2).sqrt() - 1u32),
            };
            let r = pick(r, "r")?.unwrap_or_else(|| {
                Complex::with_val(prec, (Float::with_val(prec, 3) / 10u32, Float::with_val(prec, 2) / 10u32))
            });
            Ok(fixtures::ex2(&omega, &r, &c00, prec)?)
        }
        other => Ok(fixtures::by_name(other, prec)?),
    }
}
