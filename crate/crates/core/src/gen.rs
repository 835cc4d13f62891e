//! Deterministic synthetic descriptor databases.
//!
//! Entry counts are Poisson around the requested density, clamped to
//! `1..=dim`. Dimensions are drawn uniformly without replacement and weights
//! uniformly from `1..=m`. A fraction of records are perturbed
//! copies of earlier ones so that high thresholds still have answers.

use std::io::Write;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::descriptor::{Database, Descriptor, Entry, MAX_WEIGHT};
use crate::error::{Error, Result};
use crate::io::write_record;

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub n: usize,
    pub dim: u32,
    pub max_weight: u32,
    /// Mean entries per descriptor.
    pub density: f64,
    pub seed: u64,
    /// Probability that a record is a perturbed copy of an earlier one.
    pub duplicate_rate: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n: 1000,
            dim: 1000,
            max_weight: 5,
            density: 12.0,
            seed: 1,
            duplicate_rate: 0.3,
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.dim == 0 {
            return bad("dimension must be positive");
        }
        if self.max_weight == 0 || self.max_weight > MAX_WEIGHT {
            return bad("max weight must be in 1..=65536");
        }
        if !(self.density.is_finite() && self.density > 0.0) {
            return bad("density must be positive");
        }
        if !(0.0..=1.0).contains(&self.duplicate_rate) {
            return bad("duplicate rate must be in [0, 1]");
        }
        Ok(())
    }

    fn header(&self) -> String {
        format!(
            "# synthetic descriptors n={} d={} m={} density={} seed={} duplicates={}",
            self.n, self.dim, self.max_weight, self.density, self.seed, self.duplicate_rate
        )
    }
}

/// Generates records with IDs `1..=n`.
pub fn generate(p: &GenParams) -> Result<Database> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let poisson = Poisson::new(p.density).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut xs: Vec<Descriptor> = Vec::with_capacity(p.n);
    for _ in 0..p.n {
        let x = if !xs.is_empty() && rng.random_bool(p.duplicate_rate) {
            let src = &xs[rng.random_range(0..xs.len())];
            perturb(src, p, &mut rng)
        } else {
            fresh(p, &poisson, &mut rng)
        };
        xs.push(x);
    }
    Database::new(xs.into_iter().enumerate().map(|(i, x)| (i as u64 + 1, x)).collect())
}

fn fresh(p: &GenParams, poisson: &Poisson<f64>, rng: &mut ChaCha8Rng) -> Descriptor {
    let k = (poisson.sample(rng) as u64).clamp(1, p.dim as u64) as usize;
    let dims = sample(rng, p.dim as usize, k);
    let pairs: Vec<(u32, u32)> = dims
        .iter()
        .map(|d| (d as u32 + 1, rng.random_range(1..=p.max_weight)))
        .collect();
    Descriptor::from_pairs(pairs).expect("generated entries are valid")
}

/// Applies up to two random edits to a copy of `src`. Each edit changes one
/// weight by one step or adds or removes a single entry.
fn perturb(src: &Descriptor, p: &GenParams, rng: &mut ChaCha8Rng) -> Descriptor {
    let mut entries: Vec<Entry> = src.entries().to_vec();
    for _ in 0..rng.random_range(0..=2) {
        match rng.random_range(0..3) {
            0 => {
                let i = rng.random_range(0..entries.len());
                let w = entries[i].weight;
                entries[i].weight = if rng.random_bool(0.5) {
                    (w + 1).min(p.max_weight)
                } else {
                    w.saturating_sub(1).max(1)
                };
            }
            1 => {
                let d = rng.random_range(1..=p.dim);
                if entries.iter().all(|e| e.index != d) {
                    entries.push(Entry::new(d, rng.random_range(1..=p.max_weight)));
                }
            }
            _ => {
                if entries.len() > 1 {
                    entries.remove(rng.random_range(0..entries.len()));
                }
            }
        }
    }
    entries.sort_unstable_by_key(|e| e.index);
    Descriptor::from_sorted(entries).expect("perturbed entries are valid")
}

/// Writes a generated database in the text format, preceded by a comment
/// line recording the parameters.
pub fn write_generated<W: Write>(p: &GenParams, out: &mut W) -> Result<()> {
    let db = generate(p)?;
    writeln!(out, "{}", p.header())?;
    for (id, x) in db.iter() {
        write_record(out, id, x)?;
    }
    Ok(())
}

/// Picks `count` query descriptors from the database, deterministically.
pub fn sample_queries(db: &Database, count: usize, seed: u64) -> Vec<(u64, Descriptor)> {
    let rows: Vec<usize> = (0..db.len()).filter(|&r| !db.descriptor(r).is_empty()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = count.min(rows.len());
    let mut picked: Vec<usize> = sample(&mut rng, rows.len(), k).into_iter().map(|i| rows[i]).collect();
    picked.sort_unstable();
    picked
        .into_iter()
        .map(|r| (db.id(r), db.descriptor(r).clone()))
        .collect()
}
