//! Seeded random pairs `m > p` and decreasing chains of multi-indices.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::series::MultiIndex;

fn random_index(rng: &mut ChaCha8Rng, arity: usize, degree: u32) -> MultiIndex {
    let mut entries = vec![0u32; arity];
    for _ in 0..degree {
        entries[rng.gen_range(0..arity)] += 1;
    }
    MultiIndex::new(entries)
}

/// Removes `count` units of `m` chosen uniformly among its units.
fn shrink(rng: &mut ChaCha8Rng, m: &MultiIndex, count: u32) -> MultiIndex {
    let mut units: Vec<usize> = m
        .entries()
        .iter()
        .enumerate()
        .flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize))
        .collect();
    units.shuffle(rng);
    let mut entries = m.entries().to_vec();
    for &i in units.iter().take(count as usize) {
        entries[i] -= 1;
    }
    MultiIndex::new(entries)
}

/// `count` pairs `m > p > 0` with `|m| <= max_degree`.
pub fn random_pairs(arity: usize, max_degree: u32, count: usize, seed: u64) -> Vec<(MultiIndex, MultiIndex)> {
    assert!(max_degree >= 2, "pairs need |m| >= 2");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let d = rng.gen_range(2..=max_degree);
            let m = random_index(&mut rng, arity, d);
            let drop = rng.gen_range(1..d);
            let p = shrink(&mut rng, &m, drop);
            (m, p)
        })
        .collect()
}

/// `count` chains `m^0 > m^1 > ... > m^r > 0` with `|m^0| <= max_degree`
/// and at most `max_len` members.
pub fn random_chains(arity: usize, max_degree: u32, max_len: usize, count: usize, seed: u64) -> Vec<Vec<MultiIndex>> {
    assert!(max_degree >= 1 && max_len >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let d = rng.gen_range(1..=max_degree);
            let len = rng.gen_range(1..=max_len.min(d as usize));
            // distinct lower degrees in 1..d, largest first
            let mut degrees: Vec<u32> = index::sample(&mut rng, (d - 1) as usize, len - 1)
                .into_iter()
                .map(|i| i as u32 + 1)
                .collect();
            degrees.sort_unstable_by(|a, b| b.cmp(a));
            let mut chain = vec![random_index(&mut rng, arity, d)];
            for e in degrees {
                let last = chain.last().expect("nonempty");
                let next = shrink(&mut rng, last, last.degree() - e);
                chain.push(next);
            }
            chain
        })
        .collect()
}
