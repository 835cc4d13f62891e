//! Squared-norm blocks and candidate-block selection.
//!
//! If `J(x, q) ≥ ε` then `x·q ≥ κ(|x|² + |q|²)` with `κ = ε/(1+ε)`, and
//! Cauchy–Schwarz bounds `x·q` by `|x||q|`. Squaring gives the quadratic
//! condition `κ²(c + |q|²)² ≤ c|q|²` on the block norm `c = |x|²`, whose
//! solutions form a closed interval around `|q|²`. A query only visits blocks
//! whose norm lies in that interval.
//!
//! The tighter-looking interval `ε|q|² ≤ c ≤ |q|²/ε` holds for binary vectors
//! only. With weights it can drop answers: `x = (1:1)`, `q = (1:2)` have
//! similarity 2/3 yet `|x|² = 1 < 0.5·|q|²`.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use log::warn;
use num_bigint::BigUint;

use crate::descriptor::{Database, Descriptor, Threshold};
use crate::error::{Error, Result};

/// All descriptors of squared norm `c`, in ascending ID order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub c: u64,
    /// External IDs, ascending.
    pub ids: Vec<u64>,
    /// Matching database rows.
    pub rows: Vec<usize>,
}

impl Block {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// `N^c`, the total number of entries over the block.
    pub fn total_entries(&self, db: &Database) -> usize {
        self.rows.iter().map(|&r| db.descriptor(r).cardinality()).sum()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BlockSet {
    pub blocks: BTreeMap<u64, Block>,
}

impl BlockSet {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn get(&self, c: u64) -> Option<&Block> {
        self.blocks.get(&c)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Block> {
        self.blocks.values()
    }

    /// Number of descriptors across all blocks.
    pub fn descriptor_count(&self) -> usize {
        self.blocks.values().map(Block::len).sum()
    }
}

/// Groups the database by squared norm. Empty descriptors match nothing and
/// are left out.
pub fn partition(db: &Database) -> BlockSet {
    let mut blocks: BTreeMap<u64, Block> = BTreeMap::new();
    let mut skipped = 0usize;
    for (row, (id, x)) in db.iter().enumerate() {
        if x.is_empty() {
            skipped += 1;
            continue;
        }
        let c = x.squared_norm();
        let b = blocks.entry(c).or_insert_with(|| Block {
            c,
            ids: Vec::new(),
            rows: Vec::new(),
        });
        b.ids.push(id);
        b.rows.push(row);
    }
    if skipped > 0 {
        warn!("skipped {skipped} empty descriptor(s) while partitioning");
    }
    BlockSet { blocks }
}

/// True iff `κ²(c + q)² ≤ c·q` for `κ = num/(num+den)`, evaluated exactly.
pub fn norm_admissible(c: u64, q_norm: u64, eps: Threshold) -> bool {
    let p = eps.numerator() as u128;
    let s = p + eps.denominator() as u128;
    let (c, q) = (c as u128, q_norm as u128);
    let lhs = p.checked_mul(c + q).and_then(|a| a.checked_mul(a));
    let rhs = s
        .checked_mul(s)
        .and_then(|b| b.checked_mul(c))
        .and_then(|b| b.checked_mul(q));
    if let (Some(l), Some(r)) = (lhs, rhs) {
        return l <= r;
    }
    let a = BigUint::from(p) * BigUint::from(c + q);
    let b = BigUint::from(s) * BigUint::from(s) * BigUint::from(c) * BigUint::from(q);
    &a * &a <= b
}

/// The closed integer interval of norms `c` that can hold an answer for a
/// query of squared norm `q_norm`. Every `c` inside satisfies
/// [`norm_admissible`] and every `c` outside fails it. Empty when `q_norm` is 0.
pub fn norm_range(q_norm: u64, eps: Threshold) -> RangeInclusive<u64> {
    if q_norm == 0 {
        return RangeInclusive::new(1, 0);
    }
    let ok = |c: u64| norm_admissible(c, q_norm, eps);
    // Real roots, as multiples of q: r = ((1 - 2κ²) ± sqrt(1 - 4κ²)) / 2κ².
    let k = eps.numerator() as f64 / (eps.numerator() as f64 + eps.denominator() as f64);
    let k2 = k * k;
    let disc = (1.0 - 4.0 * k2).max(0.0).sqrt();
    let lo_guess = q_norm as f64 * ((1.0 - 2.0 * k2 - disc) / (2.0 * k2));
    let hi_guess = q_norm as f64 * ((1.0 - 2.0 * k2 + disc) / (2.0 * k2));

    // Smallest admissible c in [0, q]; admissibility rises from false to true there.
    let lo = {
        let g = to_u64(lo_guess).min(q_norm);
        let slack = (g / (1 << 20)).max(4);
        let (a, b) = (g.saturating_sub(slack), g.saturating_add(slack).min(q_norm));
        if !ok(a) && ok(b) {
            first_true(a, b, ok)
        } else {
            first_true(0, q_norm, ok)
        }
    };
    // Largest admissible c in [q, u64::MAX]; admissibility falls from true to false there.
    let hi = if ok(u64::MAX) {
        u64::MAX
    } else {
        let g = to_u64(hi_guess).max(q_norm);
        let slack = (g / (1 << 20)).max(4);
        let (a, b) = (g.saturating_sub(slack).max(q_norm), g.saturating_add(slack));
        let first_bad = if ok(a) && !ok(b) {
            first_true(a, b, |c| !ok(c))
        } else {
            first_true(q_norm, u64::MAX, |c| !ok(c))
        };
        first_bad - 1
    };
    lo..=hi
}

fn to_u64(v: f64) -> u64 {
    if v.is_nan() || v <= 0.0 {
        0
    } else if v >= u64::MAX as f64 {
        u64::MAX
    } else {
        v as u64
    }
}

/// Smallest `c` in `[a, b]` with `pred(c)`, given `pred` is monotone from
/// false to true on the range and `pred(b)` holds.
fn first_true(mut a: u64, mut b: u64, pred: impl Fn(u64) -> bool) -> u64 {
    while a < b {
        let mid = a + (b - a) / 2;
        if pred(mid) {
            b = mid;
        } else {
            a = mid + 1;
        }
    }
    a
}

/// Norms of the blocks a query must visit, ascending.
pub fn candidate_norms(q: &Descriptor, eps: Threshold, blocks: &BlockSet) -> Result<Vec<u64>> {
    if q.is_empty() {
        return Err(Error::EmptyDescriptor);
    }
    Ok(blocks
        .blocks
        .range(norm_range(q.squared_norm(), eps))
        .map(|(&c, _)| c)
        .collect())
}

/// The per-block pruning threshold `k = ε/(1+ε)·(c + |q|²)`, held as the exact
/// rational `num/den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockThreshold {
    num: u128,
    den: u128,
}

impl BlockThreshold {
    pub fn new(c: u64, q_norm: u64, eps: Threshold) -> Self {
        BlockThreshold {
            num: eps.numerator() as u128 * (c as u128 + q_norm as u128),
            den: eps.numerator() as u128 + eps.denominator() as u128,
        }
    }

    pub fn numerator(&self) -> u128 {
        self.num
    }

    pub fn denominator(&self) -> u128 {
        self.den
    }

    /// True iff `bound ≥ k`.
    #[inline]
    pub fn admits(&self, bound: u64) -> bool {
        bound as u128 * self.den >= self.num
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

pub fn block_threshold(c: u64, q: &Descriptor, eps: Threshold) -> BlockThreshold {
    BlockThreshold::new(c, q.squared_norm(), eps)
}
