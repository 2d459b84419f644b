//! Rational approximations of the Liouville constant `ell = sum 10^{-k!}`:
//! with `p = 10^{N!}` and `m = sum_{k<=N} 10^{N!-k!}` the error `|p ell - m|`
//! is the tail `sum_{k>N} 10^{N!-k!}`, far below `p^{1-N}`.

use rug::ops::Pow;
use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::numeric::liouville_constant;

pub const LIOUVILLE_MAX_N: u32 = 5;

#[derive(Clone, Debug)]
pub struct LiouvilleCase {
    pub n: u32,
    pub p_tilde: Integer,
    pub m_tilde: Integer,
    /// `|p ell - m|`, computed from `ell` itself.
    pub residual: Float,
    /// `sum_{k>N} 10^{N!-k!}`, summed term by term.
    pub tail: Float,
    /// `p^{1-N}`.
    pub bound: Float,
    pub below_bound: bool,
    /// Precision of the returned values.
    pub precision_bits: u32,
    /// Precision used internally to absorb the cancellation in `p ell - m`.
    pub working_bits: u32,
}

pub fn liouville_case(n: u32, precision_bits: u32) -> Result<LiouvilleCase> {
    if n == 0 || n > LIOUVILLE_MAX_N {
        return Err(Error::Guardrail(format!("N = {n} outside 1..={LIOUVILLE_MAX_N}")));
    }
    let fact = |k: u32| (1..=k).product::<u32>();
    let nf = fact(n);
    // p ell ~ 10^{N!} while the residual is ~ 10^{N! - (N+1)!}
    let lost = (fact(n + 1) as f64 * std::f64::consts::LOG2_10).ceil() as u32;
    let working = precision_bits + lost + 64;

    let p_tilde = Integer::from(10).pow(nf);
    let mut m_tilde = Integer::new();
    for k in 1..=n {
        m_tilde += Integer::from(10).pow(nf - fact(k));
    }
    let ell = liouville_constant(working);
    let product = Float::with_val(working, &ell * &p_tilde);
    let residual_wide = Float::with_val(working, &product - &m_tilde).abs();

    let digits = (working as f64 / std::f64::consts::LOG2_10).ceil() as u64 + nf as u64 + 4;
    let mut tail_wide = Float::new(working);
    let mut k = n + 1;
    loop {
        let gap = fact(k) - nf;
        if gap as u64 > digits {
            break;
        }
        let term = Float::with_val(working, Float::i_pow_u(10, gap));
        tail_wide += Float::with_val(working, term.recip_ref());
        k += 1;
        if k > 12 {
            break;
        }
    }

    let residual = Float::with_val(precision_bits, &residual_wide);
    let tail = Float::with_val(precision_bits, &tail_wide);
    let p_float = Float::with_val(precision_bits, &p_tilde);
    let bound = p_float.pow(1 - n as i32);
    Ok(LiouvilleCase {
        n,
        below_bound: residual < bound,
        p_tilde,
        m_tilde,
        residual,
        tail,
        bound,
        precision_bits,
        working_bits: working,
    })
}
