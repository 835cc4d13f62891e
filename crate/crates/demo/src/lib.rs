//! WebAssembly bindings for the browser demo.
//!
//! The page calls three operations: [`Demo::new`] generates a database and
//! indexes it, [`Demo::search`] answers a threshold query and returns the
//! matches with the index's work counters, and [`Demo::trace`] lists the
//! tree nodes the search evaluated. Results cross the boundary as JSON.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use sitad::gen::{generate, GenParams};
use sitad::index::NodeVisit;
use sitad::partition::norm_range;
use sitad::{Database, Descriptor, QueryStats, SitadIndex, Threshold};

/// Most node visits a trace returns.
pub const TRACE_LIMIT: usize = 4000;

#[derive(Debug, Serialize, PartialEq)]
pub struct Summary {
    pub descriptors: usize,
    pub blocks: usize,
    pub entries: usize,
    pub index_bytes: usize,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct Match {
    pub id: u64,
    pub similarity: String,
    pub descriptor: String,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct SearchOutcome {
    pub query_norm: u64,
    pub norm_lo: u64,
    pub norm_hi: u64,
    pub blocks: u64,
    pub nodes: u64,
    pub ranks: u64,
    /// Descriptors a one-vs-all scan would compare.
    pub scanned_by_scan: usize,
    /// Descriptors inside the selected blocks.
    pub in_selected_blocks: usize,
    pub matches: Vec<Match>,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct TracedNode {
    pub block: u64,
    pub depth: usize,
    pub start: usize,
    pub end: usize,
    pub bound: u64,
    pub pruned: bool,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct Trace {
    pub truncated: bool,
    pub nodes: Vec<TracedNode>,
}

/// The demo state, usable from Rust without a browser.
pub struct DemoState {
    db: Database,
    index: SitadIndex,
}

impl DemoState {
    pub fn generate(n: usize, dim: u32, max_weight: u32, density: f64, seed: u64) -> Result<Self, String> {
        let db = generate(&GenParams {
            n,
            dim,
            max_weight,
            density,
            seed,
            ..Default::default()
        })
        .map_err(|e| e.to_string())?;
        let index = SitadIndex::build(&db);
        Ok(DemoState { db, index })
    }

    pub fn summary(&self) -> Summary {
        Summary {
            descriptors: self.db.len(),
            blocks: self.index.blocks().len(),
            entries: self.db.total_entries(),
            index_bytes: self.index.space().total(),
        }
    }

    /// The stored descriptor at `row`, wrapping around, in `d:f` form.
    pub fn sample(&self, row: usize) -> String {
        if self.db.is_empty() {
            return String::new();
        }
        self.db.descriptor(row % self.db.len()).to_string()
    }

    pub fn search(&self, query: &str, eps: &str) -> Result<SearchOutcome, String> {
        let (q, e) = parse_inputs(query, eps)?;
        let (hits, st): (_, QueryStats) = self.index.search(&q, e).map_err(|e| e.to_string())?;
        let r = norm_range(q.squared_norm(), e);
        let in_selected_blocks = self
            .index
            .candidate_blocks(q.squared_norm(), e)
            .iter()
            .map(|b| b.len())
            .sum();
        Ok(SearchOutcome {
            query_norm: q.squared_norm(),
            norm_lo: *r.start(),
            norm_hi: *r.end(),
            blocks: st.selected_blocks,
            nodes: st.traversed_nodes,
            ranks: st.rank_ops,
            scanned_by_scan: self.db.len(),
            in_selected_blocks,
            matches: hits
                .iter()
                .map(|h| Match {
                    id: h.id,
                    similarity: h.similarity.to_decimal(6),
                    descriptor: self.db.get(h.id).map(|x| x.to_string()).unwrap_or_default(),
                })
                .collect(),
        })
    }

    pub fn trace(&self, query: &str, eps: &str) -> Result<Trace, String> {
        let (q, e) = parse_inputs(query, eps)?;
        let mut nodes = Vec::new();
        let mut truncated = false;
        for block in self.index.candidate_blocks(q.squared_norm(), e) {
            let mut open: Vec<(usize, usize)> = Vec::new();
            let mut st = QueryStats::default();
            block.search_traced(&q, e, &mut st, |v: NodeVisit| {
                while let Some(&(s, t)) = open.last() {
                    if s <= v.start && v.end <= t {
                        break;
                    }
                    open.pop();
                }
                let depth = open.len();
                open.push((v.start, v.end));
                if nodes.len() < TRACE_LIMIT {
                    nodes.push(TracedNode {
                        block: block.norm(),
                        depth,
                        start: v.start,
                        end: v.end,
                        bound: v.bound,
                        pruned: v.pruned,
                    });
                } else {
                    truncated = true;
                }
            });
        }
        Ok(Trace { truncated, nodes })
    }
}

fn parse_inputs(query: &str, eps: &str) -> Result<(Descriptor, Threshold), String> {
    let q: Descriptor = query.trim().parse().map_err(|e: sitad::Error| e.to_string())?;
    if q.is_empty() {
        return Err("the query has no entries".into());
    }
    let e: Threshold = eps.trim().parse().map_err(|e: sitad::Error| e.to_string())?;
    Ok((q, e))
}

fn to_json<T: Serialize>(v: &T) -> Result<String, JsError> {
    serde_json::to_string(v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub struct Demo {
    state: DemoState,
}

#[wasm_bindgen]
impl Demo {
    /// Generates `n` descriptors and indexes them.
    #[wasm_bindgen(constructor)]
    pub fn new(n: usize, dim: u32, max_weight: u32, density: f64, seed: u32) -> Result<Demo, JsError> {
        let state = DemoState::generate(n, dim, max_weight, density, seed as u64).map_err(|e| JsError::new(&e))?;
        Ok(Demo { state })
    }

    /// JSON summary of the database and index sizes.
    pub fn summary(&self) -> Result<String, JsError> {
        to_json(&self.state.summary())
    }

    /// A stored descriptor to use as a query.
    pub fn sample(&self, row: usize) -> String {
        self.state.sample(row)
    }

    /// JSON matches and counters for `query` (`d:f` pairs) at threshold `eps`.
    pub fn search(&self, query: &str, eps: &str) -> Result<String, JsError> {
        to_json(&self.state.search(query, eps).map_err(|e| JsError::new(&e))?)
    }

    /// JSON list of evaluated tree nodes for the same search.
    pub fn trace(&self, query: &str, eps: &str) -> Result<String, JsError> {
        to_json(&self.state.trace(query, eps).map_err(|e| JsError::new(&e))?)
    }
}
