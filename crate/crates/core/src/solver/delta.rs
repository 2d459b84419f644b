//! The comparison sequence `delta_m` for which `|c_m| <= delta_m C_m`.
//!
//! `delta_m = 1` on unit indices and `delta_m = eps_m mu_m` above, where
//! `mu_m` is the largest product `prod s^n_l delta_l` over splittings of `m`
//! into at least two nonzero parts. The maximum over all partitions is
//! reached through binary splits: with `P(m)` the best product over
//! partitions into one or more parts,
//! `P(m) = max(g(m), max_{a+b=m} P(a) P(b))` and `mu_m = max_{a+b=m} P(a) P(b)`.

use rug::ops::Pow;
use rug::Float;

use super::{divisor_table, Levels};
use crate::error::{Error, Result};
use crate::numeric::{abs, QContext};
use crate::reduction::ReducedEquation;
use crate::series::{MIndexSeries, MultiIndexSpace};

/// Largest total degree the table is built for; the number of partitions
/// grows too quickly beyond this to be useful as an oracle.
pub const DELTA_DEGREE_LIMIT: u32 = 10;

#[derive(Clone, Debug)]
pub struct DeltaTable {
    pub n: u32,
    pub eps: MIndexSeries<Float>,
    pub s: MIndexSeries<Float>,
    pub mu: MIndexSeries<Float>,
    pub delta: MIndexSeries<Float>,
}

pub fn delta_sequence(red: &ReducedEquation, ctx: &QContext, max_degree: u32) -> Result<DeltaTable> {
    if max_degree > DELTA_DEGREE_LIMIT {
        return Err(Error::Guardrail(format!(
            "delta table requested to degree {max_degree}, limit is {DELTA_DEGREE_LIMIT}"
        )));
    }
    let prec = ctx.precision_bits();
    let space = MultiIndexSpace::new(red.arity(), max_degree);
    let divisors = divisor_table(red, ctx, &space)?;
    let eps: Levels<Float> = divisors
        .iter()
        .map(|level| level.iter().map(|v| Float::with_val(prec, abs(v).recip_ref())).collect())
        .collect();
    let mut s: Levels<Float> = vec![vec![Float::with_val(prec, 1)]];
    for d in 1..=max_degree {
        let level = space
            .level(d)
            .iter()
            .map(|m| {
                let size = abs(&ctx.power(&m.weight(red.generators(), prec))?);
                Ok(size.max(&Float::with_val(prec, 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        s.push(level);
    }
    Ok(delta_from_parts(&space, &eps, &s, red.order() as u32))
}

/// The dynamic program on explicit `eps_m` and `s_m` tables.
pub fn delta_from_parts(space: &MultiIndexSpace, eps: &Levels<Float>, s: &Levels<Float>, n: u32) -> DeltaTable {
    let max_d = space.max_degree();
    let prec = eps[1].first().map(|x| x.prec()).unwrap_or(64);
    let mut delta: Levels<Float> = vec![vec![Float::with_val(prec, 1)]];
    let mut mu: Levels<Float> = vec![vec![Float::with_val(prec, 1)]];
    let mut best: Levels<Float> = vec![vec![Float::with_val(prec, 1)]];
    for d in 1..=max_d {
        let mut dl = Vec::new();
        let mut ml = Vec::new();
        let mut bl = Vec::new();
        for (rank, m) in space.level(d).iter().enumerate() {
            let sn = Float::with_val(prec, (&s[d as usize][rank]).pow(n));
            if d == 1 {
                dl.push(Float::with_val(prec, 1));
                ml.push(Float::with_val(prec, 0));
                bl.push(sn);
                continue;
            }
            let mut split = Float::with_val(prec, 0);
            for da in 1..d {
                for (ra, a) in space.level(da).iter().enumerate() {
                    let Some(b) = m.checked_sub(a) else { continue };
                    let rb = space.rank(&b).expect("rank");
                    let v = Float::with_val(prec, &best[da as usize][ra] * &best[(d - da) as usize][rb]);
                    if v > split {
                        split = v;
                    }
                }
            }
            let dm = Float::with_val(prec, &eps[d as usize][rank] * &split);
            let g = Float::with_val(prec, &sn * &dm);
            bl.push(if g > split { g } else { split.clone() });
            ml.push(split);
            dl.push(dm);
        }
        delta.push(dl);
        mu.push(ml);
        best.push(bl);
    }
    let pack = |t: &Levels<Float>| {
        let mut out = MIndexSeries::new(space.arity(), max_d);
        for d in 1..=max_d {
            for (m, v) in space.level(d).iter().zip(&t[d as usize]) {
                out.insert(m.clone(), v.clone());
            }
        }
        out
    };
    DeltaTable {
        n,
        eps: pack(eps),
        s: pack(s),
        mu: pack(&mu),
        delta: pack(&delta),
    }
}

impl DeltaTable {
    /// `s_m^n delta_m`.
    pub fn weighted(&self, m: &crate::series::MultiIndex) -> Option<Float> {
        let s = self.s.get(m)?;
        let d = self.delta.get(m)?;
        Some(Float::with_val(d.prec(), s.pow(self.n)) * d)
    }
}
