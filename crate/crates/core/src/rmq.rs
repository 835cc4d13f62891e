//! Range maximum queries over an immutable weight array.
//!
//! The array is cut into blocks of 32 values. A sparse table over block
//! maxima answers the whole-block middle of a range; the at most two partial
//! end blocks are scanned. Query cost is bounded by a constant and the table
//! takes `O((n/32) log n)` words. Ties resolve to the smallest index.

use crate::error::{Error, Result};

const BLOCK: usize = 32;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RmqIndex {
    values: Vec<u32>,
    /// `table[k][b]` is the argmax over blocks `b .. b + 2^k`.
    table: Vec<Vec<u32>>,
}

impl RmqIndex {
    pub fn new(values: Vec<u32>) -> Self {
        assert!(values.len() < u32::MAX as usize, "array too long");
        let nblocks = values.len().div_ceil(BLOCK);
        let mut table: Vec<Vec<u32>> = Vec::new();
        if nblocks > 0 {
            let base: Vec<u32> = (0..nblocks)
                .map(|b| scan(&values, b * BLOCK, ((b + 1) * BLOCK).min(values.len()) - 1) as u32)
                .collect();
            table.push(base);
            let mut k = 1;
            while (1 << k) <= nblocks {
                let prev = &table[k - 1];
                let half = 1 << (k - 1);
                let row: Vec<u32> = (0..=nblocks - (1 << k))
                    .map(|b| better(&values, prev[b], prev[b + half]))
                    .collect();
                table.push(row);
                k += 1;
            }
        }
        RmqIndex { values, table }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// Index (1-based) and value of the leftmost maximum of `values[s..=t]`.
    /// Panics unless `1 ≤ s ≤ t ≤ len`.
    #[inline]
    pub fn range_max(&self, s: usize, t: usize) -> (usize, u32) {
        assert!(
            s >= 1 && s <= t && t <= self.values.len(),
            "invalid range [{s}, {t}] for length {}",
            self.values.len()
        );
        let i = self.argmax0(s - 1, t - 1);
        (i + 1, self.values[i])
    }

    /// Maximum value of `values[s..=t]`.
    #[inline]
    pub fn max_value(&self, s: usize, t: usize) -> u32 {
        self.range_max(s, t).1
    }

    pub fn try_range_max(&self, s: usize, t: usize) -> Result<(usize, u32)> {
        if s == 0 || t > self.values.len() {
            return Err(Error::OutOfRange {
                index: if s == 0 { 0 } else { t },
                len: self.values.len(),
            });
        }
        if s > t {
            return Err(Error::InvalidParameter(format!("empty range [{s}, {t}]")));
        }
        Ok(self.range_max(s, t))
    }

    fn argmax0(&self, l: usize, r: usize) -> usize {
        if r - l < 2 * BLOCK {
            return scan(&self.values, l, r);
        }
        let (bl, br) = (l / BLOCK + 1, r / BLOCK - 1);
        let mut best = scan(&self.values, l, bl * BLOCK - 1);
        let k = usize::BITS - 1 - (br - bl + 1).leading_zeros();
        let row = &self.table[k as usize];
        let mid = better(&self.values, row[bl], row[br + 1 - (1 << k)]) as usize;
        if self.values[mid] > self.values[best] {
            best = mid;
        }
        let right = scan(&self.values, (br + 1) * BLOCK, r);
        if self.values[right] > self.values[best] {
            best = right;
        }
        best
    }

    pub fn heap_bytes(&self) -> usize {
        self.values.len() * 4 + self.table.iter().map(|r| r.len() * 4).sum::<usize>()
    }

    pub fn table_bytes(&self) -> usize {
        self.table.iter().map(|r| r.len() * 4).sum::<usize>()
    }
}

/// Leftmost argmax over the inclusive 0-based range.
#[inline]
fn scan(values: &[u32], l: usize, r: usize) -> usize {
    let mut best = l;
    for i in l + 1..=r {
        if values[i] > values[best] {
            best = i;
        }
    }
    best
}

#[inline]
fn better(values: &[u32], a: u32, b: u32) -> u32 {
    let (va, vb) = (values[a as usize], values[b as usize]);
    if vb > va || (vb == va && b < a) {
        b
    } else {
        a
    }
}
