//! Threshold similarity search over databases of sparse non-negative integer
//! vectors (molecular descriptors) under generalized Jaccard similarity.
//!
//! The database is partitioned into blocks of equal squared norm. Each block
//! is indexed by an intervals-splitting tree whose per-node summaries are never
//! materialized: a root inverted index (dimension offsets plus a weight array
//! with range-maximum queries) and one rank dictionary per tree level recover
//! the node upper bound on demand.
//!
//! Modules:
//! - [`descriptor`]: the data model and exact Jaccard arithmetic.
//! - [`rank`]: constant-time rank dictionary over a packed bit array.
//! - [`rmq`]: range maximum queries over the root weight array.
//! - [`partition`]: squared-norm blocks and candidate-block selection.
//! - [`reference`]: the explicit intervals-splitting tree, kept as an oracle.
//! - [`index`]: the succinct per-block index and the database-level search.
//! - [`baselines`]: one-vs-all scan and an uncompressed inverted index.
//! - [`format`]: the binary index file.
//! - [`io`]: the text format for databases and queries.
//! - [`gen`]: deterministic synthetic databases.
//! - [`bench`]: the benchmark harness.

pub mod baselines;
pub mod bench;
pub mod descriptor;
pub mod error;
pub mod format;
pub mod gen;
pub mod index;
pub mod io;
pub mod partition;
pub mod rank;
pub mod reference;
pub mod rmq;

pub use baselines::{ova_search, InvertedIndex};
pub use descriptor::{dot, jaccard_geq, jaccard_value, Database, Descriptor, Entry, Hit, Similarity, Threshold};
pub use error::{Error, Result};
pub use index::{QueryStats, SitadBlockIndex, SitadIndex};
pub use partition::{partition, Block, BlockSet};
pub use rank::RankBitVector;
pub use reference::ReferenceTree;
pub use rmq::RmqIndex;
