#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use sitad::{Database, Descriptor, Threshold};

pub const LADDER: [&str; 6] = ["0.3", "0.5", "0.9", "0.95", "0.98", "1"];

pub fn d(pairs: &[(u32, u32)]) -> Descriptor {
    Descriptor::from_pairs(pairs.iter().copied()).unwrap()
}

pub fn eps(s: &str) -> Threshold {
    s.parse().unwrap()
}

/// A nonempty descriptor with up to `max_k` entries over dimensions `1..=dim`.
pub fn random_descriptor<R: RngCore>(rng: &mut R, dim: u32, max_w: u32, max_k: usize) -> Descriptor {
    let k = rng.random_range(1..=max_k.min(dim as usize));
    let dims = rand::seq::index::sample(rng, dim as usize, k);
    let pairs: Vec<(u32, u32)> = dims
        .iter()
        .map(|i| (i as u32 + 1, rng.random_range(1..=max_w)))
        .collect();
    Descriptor::from_pairs(pairs).unwrap()
}

/// A descriptor whose weights are a permutation of `weights`, placed on
/// random distinct dimensions, so its squared norm is fixed.
pub fn with_weights<R: RngCore>(rng: &mut R, dim: u32, weights: &[u32]) -> Descriptor {
    let dims = rand::seq::index::sample(rng, dim as usize, weights.len());
    let mut w = weights.to_vec();
    w.shuffle(rng);
    Descriptor::from_pairs(dims.iter().zip(w).map(|(i, w)| (i as u32 + 1, w))).unwrap()
}

/// Up to two small edits of `x`.
pub fn perturb<R: RngCore>(rng: &mut R, x: &Descriptor, dim: u32, max_w: u32) -> Descriptor {
    let mut pairs: Vec<(u32, u32)> = x.entries().iter().map(|e| (e.index, e.weight)).collect();
    for _ in 0..rng.random_range(1..=2) {
        match rng.random_range(0..3) {
            0 => {
                let i = rng.random_range(0..pairs.len());
                pairs[i].1 = rng.random_range(1..=max_w);
            }
            1 => {
                let dnew = rng.random_range(1..=dim);
                if pairs.iter().all(|p| p.0 != dnew) {
                    pairs.push((dnew, rng.random_range(1..=max_w)));
                }
            }
            _ => {
                if pairs.len() > 1 {
                    pairs.remove(rng.random_range(0..pairs.len()));
                }
            }
        }
    }
    Descriptor::from_pairs(pairs).unwrap()
}

/// A database of `n` records in which exactly `block` records share one
/// squared norm and no other record has that norm.
pub fn db_with_block<R: RngCore>(rng: &mut R, n: usize, dim: u32, max_w: u32, block: usize) -> Database {
    let k = rng.random_range(1..=dim.min(6) as usize);
    let weights: Vec<u32> = (0..k).map(|_| rng.random_range(1..=max_w)).collect();
    let mut xs: Vec<Descriptor> = (0..block).map(|_| with_weights(rng, dim, &weights)).collect();
    let c = xs.first().map(Descriptor::squared_norm);
    while xs.len() < n {
        let x = if !xs.is_empty() && rng.random_bool(0.3) {
            let src = rng.random_range(0..xs.len());
            perturb(rng, &xs[src], dim, max_w)
        } else {
            random_descriptor(rng, dim, max_w, 8)
        };
        if Some(x.squared_norm()) != c {
            xs.push(x);
        }
    }
    xs.shuffle(rng);
    Database::new(xs.into_iter().enumerate().map(|(i, x)| (i as u64 * 3 + 1, x)).collect()).unwrap()
}

/// The eight norm-10 descriptors of the worked example.
pub fn worked_db() -> Database {
    Database::new(vec![
        (1, d(&[(1, 3), (3, 1)])),
        (2, d(&[(2, 1), (4, 3)])),
        (3, d(&[(2, 2), (4, 2), (5, 1), (6, 1)])),
        (4, d(&[(1, 1), (5, 3)])),
        (5, d(&[(2, 3), (6, 1)])),
        (6, d(&[(3, 1), (4, 3)])),
        (7, d(&[(2, 1), (3, 3)])),
        (8, d(&[(5, 3), (6, 1)])),
    ])
    .unwrap()
}
