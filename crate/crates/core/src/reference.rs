//! The explicit intervals-splitting tree.
//!
//! Every node keeps its interval `[s, e]` over block positions and a sparse
//! summary descriptor `y_v` (the elementwise maximum of the descriptors in the
//! interval). Because `y_v·q ≥ x·q` for every member `x`, a node whose
//! summary bound falls below the block threshold can be pruned. This tree is
//! memory hungry and serves as the correctness oracle for
//! [`SitadBlockIndex`](crate::index::SitadBlockIndex).

use crate::descriptor::{dot_entries, Database, Descriptor, Entry, Threshold};
use crate::index::{NodeVisit, QueryStats};
use crate::partition::{Block, BlockThreshold};

#[derive(Debug, Clone)]
pub struct RefNode {
    /// 1-based interval over block positions.
    pub start: usize,
    pub end: usize,
    pub depth: u32,
    /// Root-to-node path, one bit per level, `1` for a right turn.
    pub path: u64,
    pub summary: Vec<Entry>,
    pub children: Option<(usize, usize)>,
}

impl RefNode {
    pub fn is_leaf(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Clone)]
pub struct ReferenceTree {
    c: u64,
    ids: Vec<u64>,
    nodes: Vec<RefNode>,
}

impl ReferenceTree {
    /// Builds the tree over a nonempty block.
    pub fn build(block: &Block, db: &Database) -> Self {
        assert!(!block.is_empty(), "cannot build a tree over an empty block");
        let leaves: Vec<&Descriptor> = block.rows.iter().map(|&r| db.descriptor(r)).collect();
        let mut nodes = Vec::with_capacity(2 * leaves.len());
        build_node(&leaves, 1, leaves.len(), 0, 0, &mut nodes);
        ReferenceTree {
            c: block.c,
            ids: block.ids.clone(),
            nodes,
        }
    }

    pub fn norm(&self) -> u64 {
        self.c
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn nodes(&self) -> &[RefNode] {
        &self.nodes
    }

    pub fn root(&self) -> &RefNode {
        &self.nodes[0]
    }

    /// IDs in the block with `J(x, q) ≥ ε`, ascending.
    pub fn search(&self, q: &Descriptor, eps: Threshold, stats: &mut QueryStats) -> Vec<u64> {
        self.search_traced(q, eps, stats, |_| {})
    }

    /// Depth-first search reporting every evaluated node, left child first.
    pub fn search_traced<F: FnMut(NodeVisit)>(
        &self,
        q: &Descriptor,
        eps: Threshold,
        stats: &mut QueryStats,
        mut visit: F,
    ) -> Vec<u64> {
        let k = BlockThreshold::new(self.c, q.squared_norm(), eps);
        let mut out = Vec::new();
        self.recurse(0, q, &k, stats, &mut visit, &mut out);
        stats.results += out.len() as u64;
        out
    }

    fn recurse<F: FnMut(NodeVisit)>(
        &self,
        v: usize,
        q: &Descriptor,
        k: &BlockThreshold,
        stats: &mut QueryStats,
        visit: &mut F,
        out: &mut Vec<u64>,
    ) {
        let node = &self.nodes[v];
        let bound = node_bound(&node.summary, q);
        let pass = k.admits(bound);
        stats.traversed_nodes += 1;
        visit(NodeVisit {
            start: node.start,
            end: node.end,
            bound,
            pruned: !pass,
        });
        if !pass {
            return;
        }
        match node.children {
            None => out.push(self.ids[node.start - 1]),
            Some((l, r)) => {
                self.recurse(l, q, k, stats, visit, out);
                self.recurse(r, q, k, stats, visit, out);
            }
        }
    }
}

/// `Σ_{(d:f) ∈ Q} y[d]·f`.
pub fn node_bound(summary: &[Entry], q: &Descriptor) -> u64 {
    dot_entries(summary, q.entries())
}

/// Elementwise maximum of two sorted sparse vectors.
fn merge_max(a: &[Entry], b: &[Entry]) -> Vec<Entry> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i].index < b[j].index {
            out.push(a[i]);
            i += 1;
        } else if a[i].index > b[j].index {
            out.push(b[j]);
            j += 1;
        } else {
            out.push(Entry::new(a[i].index, a[i].weight.max(b[j].weight)));
            i += 1;
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn build_node(leaves: &[&Descriptor], s: usize, e: usize, depth: u32, path: u64, nodes: &mut Vec<RefNode>) -> usize {
    let v = nodes.len();
    nodes.push(RefNode {
        start: s,
        end: e,
        depth,
        path,
        summary: Vec::new(),
        children: None,
    });
    if s == e {
        nodes[v].summary = leaves[s - 1].entries().to_vec();
    } else {
        let mid = (s + e) / 2;
        let l = build_node(leaves, s, mid, depth + 1, path << 1, nodes);
        let r = build_node(leaves, mid + 1, e, depth + 1, path << 1 | 1, nodes);
        nodes[v].summary = merge_max(&nodes[l].summary, &nodes[r].summary);
        nodes[v].children = Some((l, r));
    }
    v
}
