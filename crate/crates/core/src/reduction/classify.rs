//! Placement of the generators relative to the unit circle and the
//! particular cases in which the convergence statement applies.

use rug::{Complex, Float};
use serde::Serialize;

use super::roots::{effective_degree, polynomial_roots};
use super::ReducedEquation;
use crate::error::Result;
use crate::numeric::{abs, ComplexJson, QContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    Inside,
    On,
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Case {
    A,
    B,
    C,
    D,
    E,
    General,
}

impl Case {
    fn letter(self) -> &'static str {
        match self {
            Case::A => "a",
            Case::B => "b",
            Case::C => "c",
            Case::D => "d",
            Case::E => "e",
            Case::General => "general",
        }
    }
}

/// Which roots of `(xi - q^lambda) L(xi)` need the diophantine check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootRegion {
    None,
    OnCircle,
    ClosedDisk,
    OutsideOpenDisk,
    All,
}

#[derive(Clone, Debug, Serialize)]
pub struct RootCheck {
    pub root: ComplexJson,
    pub modulus: f64,
    pub is_q_lambda: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub case: Case,
    pub applicable: bool,
    pub label: String,
    pub placements: Vec<Placement>,
    pub generator_moduli: Vec<f64>,
    pub degree_l: usize,
    pub order: usize,
    pub degree_equals_order: bool,
    pub l_zero_nonzero: bool,
    pub region: RootRegion,
    pub roots_to_check: Vec<RootCheck>,
}

pub fn placement(modulus: &Float, ctx: &QContext) -> Placement {
    let one = Float::with_val(ctx.precision_bits(), 1);
    let gap = Float::with_val(ctx.precision_bits(), modulus - &one);
    if gap.abs() <= ctx.threshold() {
        Placement::On
    } else if *modulus < one {
        Placement::Inside
    } else {
        Placement::Outside
    }
}

pub fn classify_case(red: &ReducedEquation, ctx: &QContext) -> Result<Classification> {
    let prec = ctx.precision_bits();
    let mut placements = Vec::new();
    let mut moduli = Vec::new();
    for g in red.generators() {
        let m = abs(&ctx.power(g)?);
        moduli.push(m.to_f64());
        placements.push(placement(&m, ctx));
    }
    let degree_l = effective_degree(red.l_coeffs(), ctx).unwrap_or(0);
    let order = red.order();
    let degree_ok = degree_l == order;
    let scale = red
        .l_coeffs()
        .iter()
        .map(abs)
        .fold(Float::new(prec), |m, a| if a > m { a } else { m });
    let l0_ok = !ctx.is_negligible(&red.l_coeffs()[0], &scale);

    let all = |p: Placement| placements.iter().all(|&x| x == p);
    let none = |p: Placement| placements.iter().all(|&x| x != p);
    let (case, region, needs_l0, needs_degree) = if all(Placement::Inside) {
        (Case::A, RootRegion::None, true, false)
    } else if all(Placement::Outside) {
        (Case::B, RootRegion::None, false, true)
    } else if all(Placement::On) {
        (Case::C, RootRegion::OnCircle, false, false)
    } else if none(Placement::Outside) {
        (Case::D, RootRegion::ClosedDisk, true, false)
    } else if none(Placement::Inside) {
        (Case::E, RootRegion::OutsideOpenDisk, false, true)
    } else {
        (Case::General, RootRegion::All, true, true)
    };

    let mut failures = Vec::new();
    if needs_l0 && !l0_ok {
        failures.push("L(0) = 0");
    }
    if needs_degree && !degree_ok {
        failures.push("deg L < n");
    }
    let placement_name = match case {
        Case::General => "mixed".to_string(),
        c => format!("case-{}", c.letter()),
    };
    let applicable = failures.is_empty();
    let label = if !applicable {
        format!("not applicable: {} with {} placement", failures.join(" and "), placement_name)
    } else {
        match case {
            Case::General => "general Theorem 1".to_string(),
            c => format!("case ({})", c.letter()),
        }
    };

    let mut roots_to_check = Vec::new();
    if region != RootRegion::None {
        let q_lambda = ctx.power(red.lambda())?;
        let radius = abs(&q_lambda);
        let mut candidates: Vec<(Complex, bool)> = vec![(q_lambda.clone(), true)];
        for r in polynomial_roots(red.l_coeffs(), ctx)? {
            if !(r.value.real().is_zero() && r.value.imag().is_zero()) {
                candidates.push((r.value, false));
            }
        }
        for (a, is_q_lambda) in candidates {
            let m = abs(&a);
            let rel = Float::with_val(prec, &m / &radius);
            let include = matches!(
                (region, placement(&rel, ctx)),
                (RootRegion::All, _)
                    | (RootRegion::OnCircle, Placement::On)
                    | (RootRegion::ClosedDisk, Placement::On | Placement::Inside)
                    | (RootRegion::OutsideOpenDisk, Placement::On | Placement::Outside)
            );
            if include {
                roots_to_check.push(RootCheck {
                    root: ComplexJson::from_complex(&a),
                    modulus: m.to_f64(),
                    is_q_lambda,
                });
            }
        }
    }

    Ok(Classification {
        case,
        applicable,
        label,
        placements,
        generator_moduli: moduli,
        degree_l,
        order,
        degree_equals_order: degree_ok,
        l_zero_nonzero: l0_ok,
        region,
        roots_to_check,
    })
}
