//! The succinct block index and the database-level threshold search.
//!
//! For a block `B^c` with positions `1..=n`, the root inverted array `A`
//! lists, dimension by dimension in ascending order, the positions of the
//! descriptors that use that dimension; `E` holds the matching weights and
//! `P` the end offset of each dimension's run. Neither `A` nor any per-node
//! copy of it is kept. Instead, each tree level stores one bit per element
//! telling whether the element moves to the left or the right child, which is
//! enough to recover the span of any dimension at any node with two rank
//! queries.
//!
//! The node bound `Σ_j max E[span_j]·f_j` needs the spans in root
//! coordinates. Within a dimension's run positions are ascending, so the
//! elements of a node form a contiguous sub-run of the root run: a left child
//! keeps the parent's root start and a right child skips the elements routed
//! left. The search carries both coordinates per query term.

use crate::descriptor::{sort_hits, Database, Descriptor, Hit, Similarity, Threshold};
use crate::error::{Error, Result};
use crate::partition::{norm_range, partition, Block, BlockThreshold};
use crate::rank::RankBitVector;
use crate::rmq::RmqIndex;

/// Per-query work counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueryStats {
    pub selected_blocks: u64,
    pub traversed_nodes: u64,
    pub rank_ops: u64,
    pub results: u64,
}

impl std::ops::AddAssign for QueryStats {
    fn add_assign(&mut self, o: Self) {
        self.selected_blocks += o.selected_blocks;
        self.traversed_nodes += o.traversed_nodes;
        self.rank_ops += o.rank_ops;
        self.results += o.results;
    }
}

/// One evaluated tree node, reported by the traced searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeVisit {
    pub start: usize,
    pub end: usize,
    pub bound: u64,
    pub pruned: bool,
}

/// A half-open-free span `[s, t]`; empty when `s > t`.
pub type Span = (usize, usize);

/// Child spans of the node-local span `[s, t]` on a node's own bit array.
pub fn descend(bits: &RankBitVector, s: usize, t: usize) -> (Span, Span) {
    let (o_before, o_upto) = (bits.rank1(s - 1), bits.rank1(t));
    let (z_before, z_upto) = (s - 1 - o_before, t - o_upto);
    ((z_before + 1, z_upto), (o_before + 1, o_upto))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SitadBlockIndex {
    pub(crate) c: u64,
    pub(crate) ids: Vec<u64>,
    /// Occurring dimensions, ascending.
    pub(crate) dims: Vec<u32>,
    /// End offset in `E` of each dimension's run (the sparse `P`).
    pub(crate) ends: Vec<u64>,
    /// `E` with its range-maximum structure.
    pub(crate) weights: RmqIndex,
    /// One routing bit array per tree level, nodes concatenated left to right.
    pub(crate) levels: Vec<RankBitVector>,
}

#[derive(Clone, Copy)]
struct Term {
    f: u64,
    /// Node-local span.
    s: usize,
    t: usize,
    /// Root-coordinate start of the same span.
    root: usize,
}

struct Frame {
    a: usize,
    b: usize,
    level: usize,
    offset: usize,
    len: usize,
    terms_start: usize,
    terms_end: usize,
}

impl SitadBlockIndex {
    /// Builds the index for a nonempty block of nonempty descriptors.
    pub fn build(block: &Block, db: &Database) -> Self {
        assert!(!block.is_empty(), "cannot index an empty block");
        let n = block.len();
        assert!(n < u32::MAX as usize);

        // (dimension, position, weight), ordered by dimension then position.
        let mut postings: Vec<(u32, u32, u32)> = Vec::with_capacity(block.total_entries(db));
        for (p, &row) in block.rows.iter().enumerate() {
            let x = db.descriptor(row);
            assert!(!x.is_empty(), "empty descriptor in block");
            postings.extend(x.entries().iter().map(|e| (e.index, p as u32 + 1, e.weight)));
        }
        postings.sort_by_key(|&(d, _, _)| d);

        let mut dims = Vec::new();
        let mut ends = Vec::new();
        for (k, &(d, _, _)) in postings.iter().enumerate() {
            if dims.last() != Some(&d) {
                if !dims.is_empty() {
                    ends.push(k as u64);
                }
                dims.push(d);
            }
        }
        ends.push(postings.len() as u64);

        let weights = RmqIndex::new(postings.iter().map(|&(_, _, w)| w).collect());
        let route: Vec<u32> = postings.iter().map(|&(_, p, _)| p).collect();
        drop(postings);
        let levels = build_levels(route, n);

        SitadBlockIndex {
            c: block.c,
            ids: block.ids.clone(),
            dims,
            ends,
            weights,
            levels,
        }
    }

    /// The block's squared norm `c`.
    pub fn norm(&self) -> u64 {
        self.c
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// `N^c`.
    pub fn total_entries(&self) -> usize {
        self.weights.len()
    }

    pub fn levels(&self) -> &[RankBitVector] {
        &self.levels
    }

    pub fn weights(&self) -> &RmqIndex {
        &self.weights
    }

    /// Sparse `P`: occurring dimensions with their run end offsets.
    pub fn offsets(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.dims.iter().copied().zip(self.ends.iter().copied())
    }

    /// Span of dimension `d` in the root arrays, or `None` if no descriptor in
    /// the block uses `d`.
    pub fn root_interval(&self, d: u32) -> Option<Span> {
        let i = self.dims.binary_search(&d).ok()?;
        let s = if i == 0 { 1 } else { self.ends[i - 1] as usize + 1 };
        Some((s, self.ends[i] as usize))
    }

    /// `Σ_j I[s_j ≤ t_j]·max E[s_j, t_j]·f_j` at the root.
    pub fn root_bound(&self, q: &Descriptor) -> u64 {
        q.entries()
            .iter()
            .filter_map(|e| {
                self.root_interval(e.index)
                    .map(|(s, t)| self.weights.max_value(s, t) as u64 * e.weight as u64)
            })
            .sum()
    }

    /// IDs with `J(x, q) ≥ ε`, ascending.
    pub fn search(&self, q: &Descriptor, eps: Threshold, stats: &mut QueryStats) -> Vec<u64> {
        let k = BlockThreshold::new(self.c, q.squared_norm(), eps);
        self.search_with(q, &k, stats, |_| {})
            .into_iter()
            .map(|(id, _)| id)
            .collect()
    }

    /// Like [`search`](Self::search), reporting every evaluated node.
    pub fn search_traced<F: FnMut(NodeVisit)>(
        &self,
        q: &Descriptor,
        eps: Threshold,
        stats: &mut QueryStats,
        visit: F,
    ) -> Vec<u64> {
        let k = BlockThreshold::new(self.c, q.squared_norm(), eps);
        self.search_with(q, &k, stats, visit)
            .into_iter()
            .map(|(id, _)| id)
            .collect()
    }

    /// Depth-first search returning `(id, x·q)` pairs in position order. At a
    /// leaf every span holds at most one element, so the bound there is the
    /// exact dot product.
    pub(crate) fn search_with<F: FnMut(NodeVisit)>(
        &self,
        q: &Descriptor,
        k: &BlockThreshold,
        stats: &mut QueryStats,
        mut visit: F,
    ) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        let mut terms: Vec<Term> = q
            .entries()
            .iter()
            .filter_map(|e| {
                self.root_interval(e.index).map(|(s, t)| Term {
                    f: e.weight as u64,
                    s,
                    t,
                    root: s,
                })
            })
            .collect();
        let mut stack = vec![Frame {
            a: 1,
            b: self.ids.len(),
            level: 0,
            offset: 0,
            len: self.weights.len(),
            terms_start: 0,
            terms_end: terms.len(),
        }];
        let mut left_buf: Vec<Term> = Vec::new();

        while let Some(fr) = stack.pop() {
            // Anything above this frame's terms belongs to finished subtrees.
            terms.truncate(fr.terms_end);
            let bound: u64 = terms[fr.terms_start..fr.terms_end]
                .iter()
                .map(|tm| self.weights.max_value(tm.root, tm.root + tm.t - tm.s) as u64 * tm.f)
                .sum();
            let pass = k.admits(bound);
            stats.traversed_nodes += 1;
            visit(NodeVisit {
                start: fr.a,
                end: fr.b,
                bound,
                pruned: !pass,
            });
            if !pass {
                continue;
            }
            if fr.a == fr.b {
                out.push((self.ids[fr.a - 1], bound));
                continue;
            }

            let bits = &self.levels[fr.level];
            let ones_base = bits.rank1(fr.offset);
            let ones = bits.rank1(fr.offset + fr.len) - ones_base;
            stats.rank_ops += 2;
            let zeros = fr.len - ones;

            let right_start = terms.len();
            left_buf.clear();
            for i in fr.terms_start..fr.terms_end {
                let tm = terms[i];
                let o_before = bits.rank1(fr.offset + tm.s - 1) - ones_base;
                let o_upto = bits.rank1(fr.offset + tm.t) - ones_base;
                stats.rank_ops += 2;
                let z_before = tm.s - 1 - o_before;
                let z_upto = tm.t - o_upto;
                if z_before < z_upto {
                    left_buf.push(Term {
                        f: tm.f,
                        s: z_before + 1,
                        t: z_upto,
                        root: tm.root,
                    });
                }
                if o_before < o_upto {
                    terms.push(Term {
                        f: tm.f,
                        s: o_before + 1,
                        t: o_upto,
                        root: tm.root + (z_upto - z_before),
                    });
                }
            }
            let left_start = terms.len();
            terms.extend_from_slice(&left_buf);

            let mid = (fr.a + fr.b) / 2;
            stack.push(Frame {
                a: mid + 1,
                b: fr.b,
                level: fr.level + 1,
                offset: fr.offset + zeros,
                len: ones,
                terms_start: right_start,
                terms_end: left_start,
            });
            stack.push(Frame {
                a: fr.a,
                b: mid,
                level: fr.level + 1,
                offset: fr.offset,
                len: zeros,
                terms_start: left_start,
                terms_end: terms.len(),
            });
        }
        stats.results += out.len() as u64;
        out
    }

    pub fn space(&self) -> SpaceReport {
        SpaceReport {
            bitvectors: self.levels.iter().map(RankBitVector::data_bytes).sum(),
            rank_samples: self.levels.iter().map(RankBitVector::aux_bytes).sum(),
            weights: self.weights.len() * 4,
            rmq: self.weights.table_bytes(),
            offsets: self.dims.len() * 4 + self.ends.len() * 8,
            ids: self.ids.len() * 8,
        }
    }
}

/// Routes the root positions down the tree, emitting one bit array per level.
/// Nodes that become leaves before the deepest level pass their elements
/// through unchanged (all-zero bits), so every level has exactly `N^c` bits
/// and a node's children together occupy the node's own range one level down.
fn build_levels(mut route: Vec<u32>, n: usize) -> Vec<RankBitVector> {
    let total = route.len();
    // (a, b, element count) per node, left to right.
    let mut nodes: Vec<(u32, u32, usize)> = vec![(1, n as u32, total)];
    let mut levels = Vec::new();
    let mut next = vec![0u32; total];
    while nodes.iter().any(|&(a, b, _)| a < b) {
        let mut words = vec![0u64; total.div_ceil(64)];
        let mut next_nodes = Vec::with_capacity(nodes.len() * 2);
        let mut off = 0;
        for &(a, b, len) in &nodes {
            let seg = &route[off..off + len];
            if a == b {
                next[off..off + len].copy_from_slice(seg);
                next_nodes.push((a, b, len));
            } else {
                let mid = (a + b) / 2;
                let mut w = off;
                for &p in seg.iter().filter(|&&p| p <= mid) {
                    next[w] = p;
                    w += 1;
                }
                let zeros = w - off;
                for (k, &p) in seg.iter().enumerate() {
                    if p > mid {
                        next[w] = p;
                        w += 1;
                        let pos = off + k;
                        words[pos / 64] |= 1 << (pos % 64);
                    }
                }
                next_nodes.push((a, mid, zeros));
                next_nodes.push((mid + 1, b, len - zeros));
            }
            off += len;
        }
        levels.push(RankBitVector::from_words(words, total));
        std::mem::swap(&mut route, &mut next);
        nodes = next_nodes;
    }
    levels
}

/// Bytes held by each part of the index.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SpaceReport {
    pub bitvectors: usize,
    pub rank_samples: usize,
    pub weights: usize,
    pub rmq: usize,
    pub offsets: usize,
    pub ids: usize,
}

impl SpaceReport {
    pub fn total(&self) -> usize {
        self.bitvectors + self.rank_samples + self.weights + self.rmq + self.offsets + self.ids
    }
}

impl std::ops::AddAssign for SpaceReport {
    fn add_assign(&mut self, o: Self) {
        self.bitvectors += o.bitvectors;
        self.rank_samples += o.rank_samples;
        self.weights += o.weights;
        self.rmq += o.rmq;
        self.offsets += o.offsets;
        self.ids += o.ids;
    }
}

/// The whole-database index: one [`SitadBlockIndex`] per occurring norm.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SitadIndex {
    pub(crate) dimension: u32,
    pub(crate) max_weight: u32,
    pub(crate) blocks: Vec<SitadBlockIndex>,
}

impl SitadIndex {
    /// Builds on the calling thread.
    pub fn build(db: &Database) -> Self {
        let parts = partition(db);
        let blocks = parts.iter().map(|b| SitadBlockIndex::build(b, db)).collect();
        Self::from_blocks(db, blocks)
    }

    /// Builds blocks concurrently on the rayon pool. The result is identical
    /// to [`SitadIndex::build`].
    #[cfg(feature = "parallel")]
    pub fn build_parallel(db: &Database) -> Self {
        use rayon::prelude::*;
        let parts = partition(db);
        let blocks: Vec<&Block> = parts.iter().collect();
        let blocks = blocks.par_iter().map(|b| SitadBlockIndex::build(b, db)).collect();
        Self::from_blocks(db, blocks)
    }

    fn from_blocks(db: &Database, blocks: Vec<SitadBlockIndex>) -> Self {
        SitadIndex {
            dimension: db.dimension(),
            max_weight: db.max_weight(),
            blocks,
        }
    }

    /// Largest dimension index in the indexed data (`D`).
    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    /// Largest weight in the indexed data (`M`).
    pub fn max_weight(&self) -> u32 {
        self.max_weight
    }

    /// Number of indexed descriptors.
    pub fn len(&self) -> usize {
        self.blocks.iter().map(SitadBlockIndex::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[SitadBlockIndex] {
        &self.blocks
    }

    pub fn block(&self, c: u64) -> Option<&SitadBlockIndex> {
        self.blocks
            .binary_search_by_key(&c, |b| b.c)
            .ok()
            .map(|i| &self.blocks[i])
    }

    /// Blocks whose norm lies in the candidate interval for `(q, ε)`.
    pub fn candidate_blocks(&self, q_norm: u64, eps: Threshold) -> &[SitadBlockIndex] {
        let r = norm_range(q_norm, eps);
        let lo = self.blocks.partition_point(|b| b.c < *r.start());
        let hi = self.blocks.partition_point(|b| b.c <= *r.end());
        &self.blocks[lo..hi]
    }

    /// All descriptors with `J(x, q) ≥ ε`, by descending similarity then
    /// ascending ID.
    pub fn search(&self, q: &Descriptor, eps: Threshold) -> Result<(Vec<Hit>, QueryStats)> {
        if q.is_empty() {
            return Err(Error::EmptyDescriptor);
        }
        let qn = q.squared_norm();
        let mut stats = QueryStats::default();
        let mut hits = Vec::new();
        for block in self.candidate_blocks(qn, eps) {
            stats.selected_blocks += 1;
            let k = BlockThreshold::new(block.c, qn, eps);
            for (id, dot) in block.search_with(q, &k, &mut stats, |_| {}) {
                hits.push(Hit {
                    id,
                    similarity: Similarity::from_parts(dot, block.c, qn)?,
                });
            }
        }
        sort_hits(&mut hits);
        Ok((hits, stats))
    }

    pub fn space(&self) -> SpaceReport {
        let mut r = SpaceReport::default();
        for b in &self.blocks {
            r += b.space();
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::jaccard_geq;
    use crate::reference::ReferenceTree;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn d(pairs: &[(u32, u32)]) -> Descriptor {
        Descriptor::from_pairs(pairs.iter().copied()).unwrap()
    }

    fn eps(s: &str) -> Threshold {
        s.parse().unwrap()
    }

    /// Eight descriptors of squared norm 10 laid out so that the root arrays
    /// are A = [1,4 | 2,3,5,7 | 1,6,7 | 2,3,6 | ...] and
    /// E = [3,1 | 1,2,3,1 | 1,1,3 | 3,2,3 | ...].
    pub(crate) fn worked_block() -> Database {
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

    fn only_block(db: &Database) -> SitadBlockIndex {
        let parts = partition(db);
        assert_eq!(parts.len(), 1);
        let block = parts.iter().next().unwrap();
        SitadBlockIndex::build(block, db)
    }

    #[test]
    fn worked_example_layout_and_bound() {
        let db = worked_block();
        let idx = only_block(&db);
        assert_eq!(idx.root_interval(1), Some((1, 2)));
        assert_eq!(idx.root_interval(3), Some((7, 9)));
        assert_eq!(idx.root_interval(4), Some((10, 12)));
        assert_eq!(idx.root_interval(9), None);
        assert_eq!(&idx.weights.values()[..12], &[3, 1, 1, 2, 3, 1, 1, 1, 3, 3, 2, 3]);

        let root = &idx.levels[0];
        // A_root[7] = 1 goes left, A_root[8] = 6 goes right.
        assert!(!root.get(7));
        assert!(root.get(8));
        // ... landing at A_left[5] and A_right[3].
        assert_eq!(root.rank0(7), 5);
        assert_eq!(root.rank1(8), 3);

        let q = d(&[(1, 3), (3, 1), (4, 2)]);
        assert_eq!(idx.root_bound(&q), 18);
        let mut first = None;
        idx.search_traced(&q, eps("0.5"), &mut QueryStats::default(), |v| {
            first.get_or_insert(v);
        });
        assert_eq!(first.unwrap().bound, 18);
    }

    #[test]
    fn level_accounting() {
        let db = worked_block();
        let idx = only_block(&db);
        assert_eq!(idx.levels.len(), 3);
        for l in &idx.levels {
            assert_eq!(l.len(), idx.total_entries());
        }
        assert_eq!(idx.offsets().last().unwrap().1 as usize, idx.total_entries());
    }

    #[test]
    fn singleton_block_has_no_levels() {
        let db = Database::new(vec![(9, d(&[(2, 1), (5, 2)]))]).unwrap();
        let idx = only_block(&db);
        assert!(idx.levels.is_empty());
        assert_eq!(idx.weights.values(), &[1, 2]);
        assert_eq!(idx.root_interval(2), Some((1, 1)));
        assert_eq!(idx.root_interval(5), Some((2, 2)));
        assert_eq!(
            idx.search(&d(&[(2, 1), (5, 2)]), eps("1"), &mut QueryStats::default()),
            vec![9]
        );
    }

    #[test]
    fn descend_on_uniform_bits() {
        let zeros = RankBitVector::from_bits(vec![false; 10]);
        let (l, r) = descend(&zeros, 3, 7);
        assert_eq!(l, (3, 7));
        assert!(r.0 > r.1);
        let ones = RankBitVector::from_bits(vec![true; 10]);
        let (l, r) = descend(&ones, 3, 7);
        assert!(l.0 > l.1);
        assert_eq!(r, (3, 7));
    }

    #[test]
    fn descend_matches_explicit_routing() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..500 {
            let n = rng.random_range(1..80);
            // Explicit A_v: values in an interval [1, 2·mid], one bit rule.
            let mid = rng.random_range(1..10);
            let a: Vec<u32> = (0..n).map(|_| rng.random_range(1..=2 * mid)).collect();
            let bits = RankBitVector::from_bits(a.iter().map(|&p| p > mid));
            let left: Vec<usize> = (0..n).filter(|&k| a[k] <= mid).collect();
            let right: Vec<usize> = (0..n).filter(|&k| a[k] > mid).collect();
            let s = rng.random_range(1..=n);
            let t = rng.random_range(s..=n);
            let (l, r) = descend(&bits, s, t);
            // Child span = positions in the child array whose source lies in [s, t].
            let span = |child: &[usize]| {
                let hits: Vec<usize> = (0..child.len())
                    .filter(|&i| child[i] + 1 >= s && child[i] < t)
                    .map(|i| i + 1)
                    .collect();
                hits.first().map(|&f| (f, *hits.last().unwrap()))
            };
            let nonempty = |(x, y): Span| (x <= y).then_some((x, y));
            assert_eq!(nonempty(l), span(&left));
            assert_eq!(nonempty(r), span(&right));
        }
    }

    #[test]
    fn root_interval_matches_a_rebuilt_root_array() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let db = random_db(&mut rng, 30, 12, 3);
            for block in partition(&db).iter() {
                let idx = SitadBlockIndex::build(block, &db);
                // Transparent A_root: (d, position) for every entry, sorted.
                let mut a: Vec<(u32, usize)> = Vec::new();
                for (p, &row) in block.rows.iter().enumerate() {
                    a.extend(db.descriptor(row).entries().iter().map(|e| (e.index, p + 1)));
                }
                a.sort();
                for dim in 1..=13 {
                    let pos: Vec<usize> = (0..a.len()).filter(|&i| a[i].0 == dim).map(|i| i + 1).collect();
                    let want = pos.first().map(|&f| (f, *pos.last().unwrap()));
                    assert_eq!(idx.root_interval(dim), want);
                }
            }
        }
    }

    fn random_db(rng: &mut ChaCha8Rng, n: usize, dim: u32, m: u32) -> Database {
        let recs = (0..n)
            .map(|i| {
                let k = rng.random_range(1..=4.min(dim as usize));
                let dims = rand::seq::index::sample(rng, dim as usize, k);
                let x = d(&dims
                    .iter()
                    .map(|j| (j as u32 + 1, rng.random_range(1..=m)))
                    .collect::<Vec<_>>());
                (i as u64 * 3 + 1, x)
            })
            .collect();
        Database::new(recs).unwrap()
    }

    #[test]
    fn agrees_with_reference_tree_and_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let ladder = ["0.3", "0.5", "0.9", "0.95", "0.98", "1"];
        for _ in 0..200 {
            let n = rng.random_range(1..=60);
            let db = random_db(&mut rng, n, 8, 2);
            let index = SitadIndex::build(&db);
            for block in partition(&db).iter() {
                let fast = SitadBlockIndex::build(block, &db);
                let slow = ReferenceTree::build(block, &db);
                for _ in 0..5 {
                    let q = if rng.random_bool(0.5) {
                        db.descriptor(block.rows[rng.random_range(0..block.len())]).clone()
                    } else {
                        random_db(&mut rng, 1, 8, 2).descriptor(0).clone()
                    };
                    let e = eps(ladder[rng.random_range(0..ladder.len())]);
                    let (mut va, mut vb) = (Vec::new(), Vec::new());
                    let (mut sa, mut sb) = (QueryStats::default(), QueryStats::default());
                    let ra = fast.search_traced(&q, e, &mut sa, |v| va.push(v));
                    let rb = slow.search_traced(&q, e, &mut sb, |v| vb.push(v));
                    let brute: Vec<u64> = block
                        .rows
                        .iter()
                        .filter(|&&r| jaccard_geq(db.descriptor(r), &q, e).unwrap())
                        .map(|&r| db.id(r))
                        .collect();
                    assert_eq!(ra, brute);
                    assert_eq!(rb, brute);
                    assert_eq!(va, vb);
                    assert_eq!(sa.traversed_nodes, sb.traversed_nodes);
                    assert!(sa.rank_ops <= 4 * q.cardinality() as u64 * sa.traversed_nodes);
                }
            }
            let q = db.descriptor(0).clone();
            let (hits, _) = index.search(&q, eps("0.5")).unwrap();
            let mut want: Vec<u64> = db
                .iter()
                .filter(|(_, x)| jaccard_geq(x, &q, eps("0.5")).unwrap())
                .map(|(id, _)| id)
                .collect();
            let mut got: Vec<u64> = hits.iter().map(|h| h.id).collect();
            want.sort();
            got.sort();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn disjoint_query_prunes_at_root() {
        let db = worked_block();
        let idx = only_block(&db);
        let mut st = QueryStats::default();
        assert!(idx.search(&d(&[(50, 1)]), eps("0.01"), &mut st).is_empty());
        assert_eq!(st.traversed_nodes, 1);
        assert_eq!(st.rank_ops, 0);
    }

    #[test]
    fn database_search_examples() {
        let db = worked_block();
        let idx = SitadIndex::build(&db);
        let (hits, st) = idx.search(db.descriptor(2), eps("1")).unwrap();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].id, 3);
        assert_eq!(hits[0].similarity.to_decimal(6), "1.000000");
        assert_eq!(st.selected_blocks, 1);

        // |q|² = 1 against norm 10: record 1 scores 3/8.
        let (hits, st) = idx.search(&d(&[(1, 1)]), eps("0.2")).unwrap();
        assert_eq!(hits.iter().map(|h| h.id).collect::<Vec<_>>(), vec![1]);
        assert_eq!(hits[0].similarity.to_decimal(6), "0.375000");
        assert_eq!(st.selected_blocks, 1);
        let (hits, st) = idx.search(&d(&[(1, 1)]), eps("0.4")).unwrap();
        assert!(hits.is_empty());
        assert_eq!(st.selected_blocks, 1);
        let (_, st) = idx.search(&d(&[(1, 1)]), eps("0.5")).unwrap();
        assert_eq!(st.selected_blocks, 0);

        assert!(matches!(
            idx.search(&Descriptor::empty(), eps("0.5")),
            Err(Error::EmptyDescriptor)
        ));
    }
}
