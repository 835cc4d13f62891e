//! Comparison engines: an exhaustive one-vs-all scan (OVA) and an
//! uncompressed inverted index with a term-at-a-time accumulator (INV).

use std::collections::HashMap;

use crate::descriptor::{dot, dot_meets, sort_hits, Database, Descriptor, Hit, Similarity, Threshold};
use crate::error::{Error, Result};

/// Evaluates the similarity against every stored descriptor.
pub fn ova_search(db: &Database, q: &Descriptor, eps: Threshold) -> Result<Vec<Hit>> {
    if q.is_empty() {
        return Err(Error::EmptyDescriptor);
    }
    let qn = q.squared_norm();
    let mut hits = Vec::new();
    for (id, x) in db.iter() {
        let p = dot(x, q);
        if p > 0 && dot_meets(p, x.squared_norm(), qn, eps) {
            hits.push(Hit {
                id,
                similarity: Similarity::from_parts(p, x.squared_norm(), qn)?,
            });
        }
    }
    sort_hits(&mut hits);
    Ok(hits)
}

#[derive(Debug, Clone, Default)]
pub struct InvertedIndex {
    /// Dimension → `(row, weight)` with rows ascending.
    postings: HashMap<u32, Vec<(u32, u32)>>,
    ids: Vec<u64>,
    norms: Vec<u64>,
}

impl InvertedIndex {
    pub fn build(db: &Database) -> Self {
        assert!(db.len() < u32::MAX as usize);
        let mut postings: HashMap<u32, Vec<(u32, u32)>> = HashMap::new();
        for (row, x) in db.descriptors().iter().enumerate() {
            for e in x.entries() {
                postings.entry(e.index).or_default().push((row as u32, e.weight));
            }
        }
        InvertedIndex {
            postings,
            ids: db.ids().to_vec(),
            norms: db.descriptors().iter().map(Descriptor::squared_norm).collect(),
        }
    }

    /// Postings of dimension `d` as `(id, weight)`; empty if absent.
    pub fn postings(&self, d: u32) -> Vec<(u64, u32)> {
        self.postings
            .get(&d)
            .map(|l| l.iter().map(|&(r, w)| (self.ids[r as usize], w)).collect())
            .unwrap_or_default()
    }

    pub fn total_postings(&self) -> usize {
        self.postings.values().map(Vec::len).sum()
    }

    /// Accumulated `x·q` for every descriptor sharing a dimension with `q`.
    pub fn accumulate(&self, q: &Descriptor) -> HashMap<u32, u64> {
        let mut acc: HashMap<u32, u64> = HashMap::new();
        for e in q.entries() {
            if let Some(list) = self.postings.get(&e.index) {
                for &(row, w) in list {
                    *acc.entry(row).or_insert(0) += w as u64 * e.weight as u64;
                }
            }
        }
        acc
    }

    pub fn search(&self, q: &Descriptor, eps: Threshold) -> Result<Vec<Hit>> {
        if q.is_empty() {
            return Err(Error::EmptyDescriptor);
        }
        let qn = q.squared_norm();
        let mut hits = Vec::new();
        for (row, p) in self.accumulate(q) {
            let xn = self.norms[row as usize];
            if dot_meets(p, xn, qn, eps) {
                hits.push(Hit {
                    id: self.ids[row as usize],
                    similarity: Similarity::from_parts(p, xn, qn)?,
                });
            }
        }
        sort_hits(&mut hits);
        Ok(hits)
    }

    pub fn heap_bytes(&self) -> usize {
        let lists: usize = self.postings.values().map(|l| l.capacity() * 8 + 24 + 4).sum();
        lists + self.ids.len() * 8 + self.norms.len() * 8
    }
}
