//! Sparse integer descriptors and exact generalized Jaccard arithmetic.
//!
//! A descriptor is a sparse vector `x` with non-negative integer entries,
//! equivalently the set `W` of its nonzero `(index, weight)` pairs. The
//! generalized Jaccard (Tanimoto) similarity is
//!
//! ```text
//! J(x, q) = x·q / (|x|² + |q|² − x·q)
//! ```
//!
//! Every comparison against a threshold is carried out in integer
//! arithmetic: thresholds are parsed into exact rationals, and
//! `J(x, q) ≥ num/den` is tested as `(num + den)·(x·q) ≥ num·(|x|² + |q|²)`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest accepted weight.
pub const MAX_WEIGHT: u32 = 1 << 16;

/// One nonzero coordinate: 1-based dimension and positive weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Entry {
    pub index: u32,
    pub weight: u32,
}

impl Entry {
    pub fn new(index: u32, weight: u32) -> Self {
        Entry { index, weight }
    }
}

/// A validated sparse descriptor. Entries are strictly ascending by index and
/// carry weights in `1..=MAX_WEIGHT`; the squared norm is computed once at
/// construction.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct Descriptor {
    entries: Vec<Entry>,
    norm: u64,
}

impl Descriptor {
    /// Builds a descriptor from `(index, weight)` pairs in any order.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut entries: Vec<Entry> = pairs.into_iter().map(|(d, f)| Entry::new(d, f)).collect();
        entries.sort_unstable_by_key(|e| e.index);
        Self::from_sorted(entries)
    }

    /// Builds a descriptor from entries that must already be sorted.
    pub fn from_sorted(entries: Vec<Entry>) -> Result<Self> {
        if entries.len() as u64 >= u32::MAX as u64 {
            return Err(Error::DescriptorTooLarge);
        }
        let mut norm: u64 = 0;
        let mut prev: Option<u32> = None;
        for e in &entries {
            if e.index == 0 {
                return Err(Error::IndexOutOfRange(0));
            }
            match prev {
                Some(p) if p == e.index => return Err(Error::DuplicateIndex(e.index)),
                Some(p) if p > e.index => {
                    return Err(Error::Malformed(format!(
                        "indices not ascending ({p} before {})",
                        e.index
                    )))
                }
                _ => {}
            }
            if e.weight == 0 {
                return Err(Error::ZeroWeight(e.index));
            }
            if e.weight > MAX_WEIGHT {
                return Err(Error::WeightOutOfRange(e.weight as u64));
            }
            let sq = e.weight as u64 * e.weight as u64;
            norm = norm.checked_add(sq).ok_or(Error::DescriptorTooLarge)?;
            prev = Some(e.index);
        }
        Ok(Descriptor { entries, norm })
    }

    pub fn empty() -> Self {
        Descriptor::default()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// Number of nonzero entries, `|W|`.
    pub fn cardinality(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `Σ f²` over the entries.
    pub fn squared_norm(&self) -> u64 {
        self.norm
    }

    /// Weight at dimension `d`, zero when absent.
    pub fn get(&self, d: u32) -> u32 {
        self.entries
            .binary_search_by_key(&d, |e| e.index)
            .map(|i| self.entries[i].weight)
            .unwrap_or(0)
    }

    pub fn max_index(&self) -> u32 {
        self.entries.last().map_or(0, |e| e.index)
    }

    pub fn max_weight(&self) -> u32 {
        self.entries.iter().map(|e| e.weight).max().unwrap_or(0)
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}:{}", e.index, e.weight)?;
        }
        Ok(())
    }
}

impl FromStr for Descriptor {
    type Err = Error;

    /// Parses a whitespace-separated list of `d:f` pairs.
    fn from_str(s: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for tok in s.split_ascii_whitespace() {
            let (d, f) = tok
                .split_once(':')
                .ok_or_else(|| Error::Malformed(format!("expected d:f, got {tok:?}")))?;
            let d = parse_int(d, tok)?;
            let f = parse_int(f, tok)?;
            if d == 0 || d > u32::MAX as i128 {
                return Err(Error::IndexOutOfRange(d.max(0) as u64));
            }
            if f == 0 {
                return Err(Error::ZeroWeight(d as u32));
            }
            if f < 0 {
                return Err(Error::Malformed(format!("negative weight in {tok:?}")));
            }
            if f > MAX_WEIGHT as i128 {
                return Err(Error::WeightOutOfRange(f.min(u64::MAX as i128) as u64));
            }
            pairs.push((d as u32, f as u32));
        }
        Descriptor::from_pairs(pairs)
    }
}

fn parse_int(s: &str, tok: &str) -> Result<i128> {
    s.parse::<i128>()
        .map_err(|_| Error::Malformed(format!("bad integer in pair {tok:?}")))
}

/// Dot product by sorted merge of the two entry lists.
pub fn dot(x: &Descriptor, y: &Descriptor) -> u64 {
    dot_entries(&x.entries, &y.entries)
}

pub(crate) fn dot_entries(a: &[Entry], b: &[Entry]) -> u64 {
    let (mut i, mut j) = (0, 0);
    let mut acc = 0u64;
    while i < a.len() && j < b.len() {
        match a[i].index.cmp(&b[j].index) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                acc += a[i].weight as u64 * b[j].weight as u64;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// A similarity threshold `ε = num/den` with `0 < ε ≤ 1`, kept exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Threshold {
    num: u64,
    den: u64,
}

impl Threshold {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 || num > den {
            return Err(Error::InvalidThreshold(format!("{num}/{den}")));
        }
        let g = gcd(num, den);
        Ok(Threshold {
            num: num / g,
            den: den / g,
        })
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// True iff a similarity `s` satisfies `s ≥ ε`.
    pub fn admits(&self, s: Similarity) -> bool {
        s.num as u128 * self.den as u128 >= self.num as u128 * s.den as u128
    }
}

impl FromStr for Threshold {
    type Err = Error;

    /// Accepts plain decimals such as `1`, `0.95`, `.5` with at most 18
    /// fractional digits.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidThreshold(s.to_string());
        let t = s.trim();
        let (int, frac) = t.split_once('.').unwrap_or((t, ""));
        if (int.is_empty() && frac.is_empty())
            || !int.bytes().all(|b| b.is_ascii_digit())
            || !frac.bytes().all(|b| b.is_ascii_digit())
            || frac.len() > 18
            || int.len() > 18
        {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int_val: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac_val: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let num = (int_val as u128 * den as u128 + frac_val as u128)
            .try_into()
            .map_err(|_| bad())?;
        Threshold::new(num, den).map_err(|_| bad())
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Exact similarity value `num/den` with `den > 0`.
#[derive(Debug, Clone, Copy)]
pub struct Similarity {
    num: u64,
    den: u64,
}

impl Similarity {
    /// Similarity of two descriptors with squared norms `nx`, `nq` and dot
    /// product `dot`. Fails when both norms are zero.
    pub fn from_parts(dot: u64, nx: u64, nq: u64) -> Result<Self> {
        let den = nx as u128 + nq as u128 - dot as u128;
        if den == 0 {
            return Err(Error::EmptyDescriptor);
        }
        // den ≥ dot because |x|² + |q|² ≥ 2 x·q, and dot ≤ max(nx, nq).
        let den = u64::try_from(den).map_err(|_| Error::DescriptorTooLarge)?;
        Ok(Similarity { num: dot, den })
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Rounds half-up to `digits` decimal places, exactly.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scale = 10u128.pow(digits);
        let scaled = (2 * self.num as u128 * scale + self.den as u128) / (2 * self.den as u128);
        let (int, frac) = (scaled / scale, scaled % scale);
        if digits == 0 {
            int.to_string()
        } else {
            format!("{int}.{frac:0width$}", width = digits as usize)
        }
    }
}

impl PartialEq for Similarity {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Similarity {}

impl PartialOrd for Similarity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Similarity {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl fmt::Display for Similarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(6))
    }
}

/// Exact generalized Jaccard similarity.
pub fn jaccard_value(x: &Descriptor, q: &Descriptor) -> Result<Similarity> {
    Similarity::from_parts(dot(x, q), x.squared_norm(), q.squared_norm())
}

/// `J(x, q) ≥ ε`, decided without rounding.
pub fn jaccard_geq(x: &Descriptor, q: &Descriptor, eps: Threshold) -> Result<bool> {
    if x.is_empty() && q.is_empty() {
        return Err(Error::EmptyDescriptor);
    }
    Ok(dot_meets(dot(x, q), x.squared_norm(), q.squared_norm(), eps))
}

/// `(num + den)·dot ≥ num·(nx + nq)`.
pub(crate) fn dot_meets(dot: u64, nx: u64, nq: u64, eps: Threshold) -> bool {
    (eps.num as u128 + eps.den as u128) * dot as u128 >= eps.num as u128 * (nx as u128 + nq as u128)
}

/// One search result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hit {
    pub id: u64,
    pub similarity: Similarity,
}

/// Sorts by descending similarity, then ascending ID.
pub fn sort_hits(hits: &mut [Hit]) {
    hits.sort_unstable_by(|a, b| b.similarity.cmp(&a.similarity).then(a.id.cmp(&b.id)));
}

/// An immutable descriptor store, ordered by ascending external ID.
#[derive(Debug, Clone, Default)]
pub struct Database {
    ids: Vec<u64>,
    descriptors: Vec<Descriptor>,
}

impl Database {
    pub fn new(mut records: Vec<(u64, Descriptor)>) -> Result<Self> {
        records.sort_by_key(|(id, _)| *id);
        if let Some(w) = records.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateId(w[0].0));
        }
        let (ids, descriptors) = records.into_iter().unzip();
        Ok(Database { ids, descriptors })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn descriptors(&self) -> &[Descriptor] {
        &self.descriptors
    }

    pub fn id(&self, row: usize) -> u64 {
        self.ids[row]
    }

    pub fn descriptor(&self, row: usize) -> &Descriptor {
        &self.descriptors[row]
    }

    pub fn row_of(&self, id: u64) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    pub fn get(&self, id: u64) -> Option<&Descriptor> {
        self.row_of(id).map(|r| &self.descriptors[r])
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &Descriptor)> {
        self.ids.iter().copied().zip(self.descriptors.iter())
    }

    /// Largest dimension index present (`D`).
    pub fn dimension(&self) -> u32 {
        self.descriptors.iter().map(Descriptor::max_index).max().unwrap_or(0)
    }

    /// Largest weight present (`M`).
    pub fn max_weight(&self) -> u32 {
        self.descriptors.iter().map(Descriptor::max_weight).max().unwrap_or(0)
    }

    /// `Σ |W_i|`.
    pub fn total_entries(&self) -> usize {
        self.descriptors.iter().map(Descriptor::cardinality).sum()
    }
}
