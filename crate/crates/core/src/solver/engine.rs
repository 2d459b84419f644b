//! Degree-by-degree evaluation of the coefficient recurrence
//!
//! ```text
//! D(m) c_m = sum_{(k, p)} A_{k,p} [z^{m-k}] prod_j (F_j)^{p_j},   F_j = sum_l w_j(l) c_l z^l
//! ```
//!
//! shared by the complex solver (`w_j(l) = q^{j.l}`, `D(m) = L(q^lambda q^m)`)
//! and the majorant (`w = 1`, `D = nu~`). Coefficients are stored densely per
//! degree. Each product `prod_j F_j^{p_j}` is a memoized node built as
//! `F_{j*} * node(p - e_{j*})`; every round first extends the nodes to the new
//! degree, then solves for the new coefficients, then extends the `F_j`.
//! Within one coefficient the summation order is fixed, so results do not
//! depend on how rayon distributes the work.

use std::collections::BTreeMap;

use rayon::prelude::*;
use rug::{Complex, Float};

use crate::series::{MultiIndex, MultiIndexSpace};

pub trait Coeff: Clone + Send + Sync {
    fn zero(prec: u32) -> Self;
    fn is_zero(&self) -> bool;
    /// `self += a * b`
    fn add_product(&mut self, a: &Self, b: &Self);
    fn add(&mut self, a: &Self);
    fn mul(&self, b: &Self) -> Self;
    fn div(&self, b: &Self) -> Self;
}

impl Coeff for Complex {
    fn zero(prec: u32) -> Self {
        Complex::new(prec)
    }
    fn is_zero(&self) -> bool {
        self.real().is_zero() && self.imag().is_zero()
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        let prec = self.prec().0;
        *self += Complex::with_val(prec, a * b);
    }
    fn add(&mut self, a: &Self) {
        *self += a;
    }
    fn mul(&self, b: &Self) -> Self {
        Complex::with_val(self.prec().0, self * b)
    }
    fn div(&self, b: &Self) -> Self {
        Complex::with_val(self.prec().0, self / b)
    }
}

impl Coeff for Float {
    fn zero(prec: u32) -> Self {
        Float::new(prec)
    }
    fn is_zero(&self) -> bool {
        Float::is_zero(self)
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        let prec = self.prec();
        *self += Float::with_val(prec, a * b);
    }
    fn add(&mut self, a: &Self) {
        *self += a;
    }
    fn mul(&self, b: &Self) -> Self {
        Float::with_val(self.prec(), self * b)
    }
    fn div(&self, b: &Self) -> Self {
        Float::with_val(self.prec(), self / b)
    }
}

/// `coeff * z^k * prod_j u_j^{p_j}` on the right-hand side.
#[derive(Clone, Debug)]
pub struct RecTerm<T> {
    pub k: MultiIndex,
    pub p: Vec<u32>,
    pub coeff: T,
}

/// Dense per-degree table: `table[d][rank]`.
pub type Levels<T> = Vec<Vec<T>>;

pub struct Recurrence<'a, T> {
    pub space: &'a MultiIndexSpace,
    pub terms: &'a [RecTerm<T>],
    /// `weights[j][d][rank]`, one table per dilated copy `F_j`.
    pub weights: &'a [Levels<T>],
    /// `divisors[d][rank]`, level 0 unused.
    pub divisors: &'a Levels<T>,
    pub precision_bits: u32,
}

struct Node<T> {
    /// index into `weights` of the factor peeled off
    factor: usize,
    /// key of `node(p - e_factor)`, or `None` when that is the bare `F_factor`
    rest: Option<Vec<u32>>,
    min_degree: u32,
    levels: Levels<T>,
}

impl<'a, T: Coeff> Recurrence<'a, T> {
    /// Solves for every `c_m` with `1 <= |m| <= space.max_degree()`.
    pub fn solve(&self) -> Levels<T> {
        let prec = self.precision_bits;
        let max_d = self.space.max_degree();
        let vars = self.weights.len();

        let mut c: Levels<T> = vec![Vec::new(); max_d as usize + 1];
        c[0] = vec![T::zero(prec)];
        let mut f: Vec<Levels<T>> = vec![vec![Vec::new(); max_d as usize + 1]; vars];
        for fj in &mut f {
            fj[0] = vec![T::zero(prec)];
        }

        let mut nodes: BTreeMap<Vec<u32>, Node<T>> = BTreeMap::new();
        for term in self.terms {
            let mut p = term.p.clone();
            while p.iter().sum::<u32>() >= 2 && !nodes.contains_key(&p) {
                let factor = p.iter().rposition(|&x| x > 0).expect("nonzero p");
                let mut rest = p.clone();
                rest[factor] -= 1;
                let degree: u32 = p.iter().sum();
                nodes.insert(
                    p.clone(),
                    Node {
                        factor,
                        rest: if degree >= 3 { Some(rest.clone()) } else { None },
                        min_degree: degree,
                        levels: vec![Vec::new(); max_d as usize + 1],
                    },
                );
                p = rest;
            }
        }
        // building order: by total degree so that `rest` is always ready
        let mut order: Vec<Vec<u32>> = nodes.keys().cloned().collect();
        order.sort_by_key(|p| (p.iter().sum::<u32>(), p.clone()));

        for d in 1..=max_d {
            for key in &order {
                let (factor, rest, min_degree) = {
                    let n = &nodes[key];
                    (n.factor, n.rest.clone(), n.min_degree)
                };
                if d < min_degree {
                    continue;
                }
                let level = {
                    let rest_levels: &Levels<T> = match &rest {
                        Some(r) => &nodes[r].levels,
                        None => {
                            let other = key
                                .iter()
                                .enumerate()
                                .position(|(j, &x)| x > (j == factor) as u32)
                                .expect("second factor");
                            &f[other]
                        }
                    };
                    self.convolve_level(d, &f[factor], rest_levels, min_degree - 1)
                };
                nodes.get_mut(key).expect("node").levels[d as usize] = level;
            }

            let level: Vec<T> = self
                .space
                .level(d)
                .par_iter()
                .enumerate()
                .map(|(rank, m)| {
                    let mut acc = T::zero(prec);
                    for term in self.terms {
                        let Some(r) = m.checked_sub(&term.k) else { continue };
                        let rd = r.degree();
                        let pd: u32 = term.p.iter().sum();
                        let value = match pd {
                            0 => {
                                if rd != 0 {
                                    continue;
                                }
                                None
                            }
                            1 => {
                                if rd == 0 {
                                    continue;
                                }
                                let j = term.p.iter().position(|&x| x == 1).expect("unit p");
                                Some(&f[j][rd as usize][self.space.rank(&r).expect("rank")])
                            }
                            _ => {
                                if rd < pd {
                                    continue;
                                }
                                Some(&nodes[&term.p].levels[rd as usize][self.space.rank(&r).expect("rank")])
                            }
                        };
                        match value {
                            None => acc.add(&term.coeff),
                            Some(v) => acc.add_product(&term.coeff, v),
                        }
                    }
                    acc.div(&self.divisors[d as usize][rank])
                })
                .collect();
            c[d as usize] = level;

            for (j, fj) in f.iter_mut().enumerate() {
                fj[d as usize] = c[d as usize]
                    .iter()
                    .zip(&self.weights[j][d as usize])
                    .map(|(cm, w)| cm.mul(w))
                    .collect();
            }
        }
        c
    }

    /// Degree-`d` level of `a * b` where `a` starts at degree 1 and `b` at `b_min`.
    fn convolve_level(&self, d: u32, a: &Levels<T>, b: &Levels<T>, b_min: u32) -> Vec<T> {
        let prec = self.precision_bits;
        self.space
            .level(d)
            .par_iter()
            .map(|t| {
                let mut acc = T::zero(prec);
                for da in 1..=d.saturating_sub(b_min) {
                    let db = d - da;
                    for (ra, ia) in self.space.level(da).iter().enumerate() {
                        let Some(ib) = t.checked_sub(ia) else { continue };
                        let rb = self.space.rank(&ib).expect("rank");
                        let x = &a[da as usize][ra];
                        if x.is_zero() {
                            continue;
                        }
                        acc.add_product(x, &b[db as usize][rb]);
                    }
                }
                acc
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones(space: &MultiIndexSpace, prec: u32) -> Levels<Float> {
        (0..=space.max_degree())
            .map(|d| vec![Float::with_val(prec, 1); space.level(d).len()])
            .collect()
    }

    #[test]
    fn catalan_numbers_from_w_equals_z_plus_w_squared() {
        // W = z + W^2 has C_m = Catalan(m - 1)
        let space = MultiIndexSpace::new(1, 10);
        let terms = vec![
            RecTerm { k: MultiIndex::new(vec![1]), p: vec![0], coeff: Float::with_val(64, 1) },
            RecTerm { k: MultiIndex::new(vec![0]), p: vec![2], coeff: Float::with_val(64, 1) },
        ];
        let weights = vec![ones(&space, 64)];
        let divisors = ones(&space, 64);
        let rec = Recurrence { space: &space, terms: &terms, weights: &weights, divisors: &divisors, precision_bits: 64 };
        let c = rec.solve();
        let catalan = [1u32, 1, 2, 5, 14, 42, 132, 429, 1430, 4862];
        for (d, want) in catalan.iter().enumerate() {
            assert_eq!(c[d + 1][0], *want);
        }
    }

    #[test]
    fn cubic_node_chain() {
        // W = z + W^3: C_{2k+1} = binom(3k, k) / (2k + 1)
        let space = MultiIndexSpace::new(1, 9);
        let terms = vec![
            RecTerm { k: MultiIndex::new(vec![1]), p: vec![0], coeff: Float::with_val(64, 1) },
            RecTerm { k: MultiIndex::new(vec![0]), p: vec![3], coeff: Float::with_val(64, 1) },
        ];
        let weights = vec![ones(&space, 64)];
        let divisors = ones(&space, 64);
        let rec = Recurrence { space: &space, terms: &terms, weights: &weights, divisors: &divisors, precision_bits: 64 };
        let c = rec.solve();
        let want = [(1, 1u32), (3, 1), (5, 3), (7, 12), (9, 55)];
        for (d, v) in want {
            assert_eq!(c[d][0], v);
        }
        assert!(c[2][0].is_zero() && c[4][0].is_zero());
    }

    #[test]
    fn mixed_dilations_two_variables() {
        // W = z1 + z2 + u0 * u1 where u_j carries weight 2^j per unit degree
        let space = MultiIndexSpace::new(2, 4);
        let prec = 64;
        let terms = vec![
            RecTerm { k: MultiIndex::new(vec![1, 0]), p: vec![0, 0], coeff: Float::with_val(prec, 1) },
            RecTerm { k: MultiIndex::new(vec![0, 1]), p: vec![0, 0], coeff: Float::with_val(prec, 1) },
            RecTerm { k: MultiIndex::new(vec![0, 0]), p: vec![1, 1], coeff: Float::with_val(prec, 1) },
        ];
        let w1: Levels<Float> = (0..=4u32)
            .map(|d| vec![Float::with_val(prec, 1u64 << d); space.level(d).len()])
            .collect();
        let weights = vec![ones(&space, prec), w1];
        let divisors = ones(&space, prec);
        let rec = Recurrence { space: &space, terms: &terms, weights: &weights, divisors: &divisors, precision_bits: prec };
        let c = rec.solve();
        // degree 2: c_{(1,1)} = c10 c01 2 + c01 c10 2 = 4, c_{(2,0)} = 2
        let r11 = space.rank(&MultiIndex::new(vec![1, 1])).unwrap();
        let r20 = space.rank(&MultiIndex::new(vec![2, 0])).unwrap();
        assert_eq!(c[2][r11], 4);
        assert_eq!(c[2][r20], 2);
    }
}
