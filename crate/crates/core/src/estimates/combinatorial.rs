//! Exhaustive check of the product inequality
//! `prod y_i^2 prod x_p >= t^3 / 8^{r + tau - 1}` over positive integers
//! `x_0..x_{r-1}`, `y_1..y_tau` with `sum x + sum y = t`, `sum y > t / 2`,
//! every `y_i <= t / 2`, `tau >= 2` and `r >= 0`.

use rug::Integer;

use super::{EstimateFailure, EstimateReport};
use crate::error::{Error, Result};

pub const COMBINATORIAL_LIMIT: u32 = 14;

/// All compositions of `total` into parts of size at most `cap`.
fn compositions(total: u32, cap: u32, prefix: &mut Vec<u32>, out: &mut dyn FnMut(&[u32])) {
    if total == 0 {
        out(prefix);
        return;
    }
    for part in 1..=total.min(cap) {
        prefix.push(part);
        compositions(total - part, cap, prefix, out);
        prefix.pop();
    }
}

pub fn verify_combinatorial(total: u32) -> Result<EstimateReport> {
    if total > COMBINATORIAL_LIMIT {
        return Err(Error::Guardrail(format!(
            "combinatorial total {total} above {COMBINATORIAL_LIMIT}"
        )));
    }
    let mut report = EstimateReport::new("combinatorial", None);
    let cube = Integer::from(total * total * total);
    let half = total / 2;
    for sum_y in (half + 1)..=total {
        let mut xs_all = Vec::new();
        compositions(total - sum_y, total, &mut Vec::new(), &mut |xs| xs_all.push(xs.to_vec()));
        let mut ys_all = Vec::new();
        compositions(sum_y, half, &mut Vec::new(), &mut |ys| {
            if ys.len() >= 2 {
                ys_all.push(ys.to_vec());
            }
        });
        for ys in &ys_all {
            for xs in &xs_all {
                report.checked += 1;
                let mut lhs = Integer::from(1);
                for y in ys {
                    lhs *= y * y;
                }
                for x in xs {
                    lhs *= x;
                }
                // integers throughout: lhs 8^{r + tau - 1} >= t^3
                let scaled = Integer::from(&lhs << (3 * (xs.len() + ys.len() - 1)) as u32);
                let ratio = cube.to_f64() / scaled.to_f64();
                if ratio > report.worst_slack {
                    report.worst_slack = ratio;
                    report.worst_instance = Some(format!("x = {xs:?}, y = {ys:?}"));
                }
                if scaled < cube {
                    report.failures.push(EstimateFailure {
                        instance: format!("x = {xs:?}, y = {ys:?}"),
                        lhs: lhs.to_f64(),
                        rhs: cube.to_f64() / 8f64.powi((xs.len() + ys.len() - 1) as i32),
                        ratio,
                    });
                }
            }
        }
    }
    let expected = admissible_count(total);
    if report.checked as u64 != expected {
        report.failures.push(EstimateFailure {
            instance: format!("enumerated {} tuples, expected {expected}", report.checked),
            lhs: report.checked as f64,
            rhs: expected as f64,
            ratio: f64::NAN,
        });
    }
    Ok(report)
}

/// Number of admissible `(x, y)` tuples, counted without enumeration: the
/// `x` part is any composition of `t - sum y` (`2^{k-1}` of them for `k > 0`),
/// the `y` part a composition of `sum y` into at least two parts `<= t / 2`.
pub fn admissible_count(total: u32) -> u64 {
    let half = total / 2;
    // capped[k]: compositions of k with every part <= half
    let mut capped = vec![0u64; total as usize + 1];
    capped[0] = 1;
    for k in 1..=total as usize {
        capped[k] = (1..=half as usize).filter(|&p| p <= k).map(|p| capped[k - p]).sum();
    }
    ((half + 1)..=total)
        .map(|sum_y| {
            let free = total - sum_y;
            let xs = if free == 0 { 1 } else { 1u64 << (free - 1) };
            let single = u64::from(sum_y <= half);
            xs * (capped[sum_y as usize] - single)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_at_two() {
        let r = verify_combinatorial(2).unwrap();
        assert_eq!(r.checked, 1);
        assert!(r.passed());
        assert_eq!(r.worst_slack, 1.0);
    }

    #[test]
    fn small_totals_by_hand() {
        // t = 3: only y = (1, 1) with x = (1); 1 * 64 >= 27
        let r = verify_combinatorial(3).unwrap();
        assert_eq!(r.checked, 2);
        assert!(r.passed());
        // t = 4 contains y = (2, 2): 16 * 8 >= 64
        let r = verify_combinatorial(4).unwrap();
        assert_eq!(r.checked, 8);
        assert!(r.passed());
    }

    #[test]
    fn counts_match_brute_force_over_all_tuples() {
        // split t into an arbitrary sequence of parts and a marker of where y starts
        for total in 1..=10u32 {
            let mut count = 0u64;
            let mut all = Vec::new();
            compositions(total, total, &mut Vec::new(), &mut |c| all.push(c.to_vec()));
            for c in &all {
                for split in 0..=c.len() {
                    let (xs, ys) = c.split_at(split);
                    let sy: u32 = ys.iter().sum();
                    if ys.len() >= 2 && 2 * sy > total && ys.iter().all(|y| 2 * y <= total) {
                        count += 1;
                    }
                    let _ = xs;
                }
            }
            assert_eq!(admissible_count(total), count, "t = {total}");
        }
    }

    #[test]
    fn all_totals_up_to_the_limit_hold() {
        for total in 2..=COMBINATORIAL_LIMIT {
            let r = verify_combinatorial(total).unwrap();
            assert!(r.passed(), "t = {total}: {:?}", r.failures.first());
            assert!(r.worst_slack <= 1.0);
        }
    }

    #[test]
    fn guardrail() {
        assert!(matches!(verify_combinatorial(15), Err(Error::Guardrail(_))));
    }
}
