//! Binary index file.
//!
//! All integers are little-endian `u64` except where noted:
//!
//! ```text
//! "SITD"                      magic
//! u32                         format version
//! D, M, N, block count, weight width in bytes (= 4), total file length
//! per block: c, |B^c|, N^c, byte offset of the block section
//! per block section:
//!     ids                     |B^c| × u64
//!     offset count, then (d, end) pairs
//!     weights E               N^c × u32
//!     level count, then per level: bit length, packed words
//! u32                         CRC-32 of everything before it
//! ```
//!
//! Rank samples and range-maximum tables are rebuilt on load.

use std::io::Write;

use crate::error::{Error, Result};
use crate::index::{SitadBlockIndex, SitadIndex};
use crate::rank::RankBitVector;
use crate::rmq::RmqIndex;

pub const MAGIC: &[u8; 4] = b"SITD";
pub const VERSION: u32 = 1;
const WEIGHT_BYTES: u64 = 4;
const HEADER_END: usize = 8 + 6 * 8;
const LENGTH_AT: usize = HEADER_END - 8;

pub fn to_bytes(idx: &SitadIndex) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for v in [
        idx.dimension as u64,
        idx.max_weight as u64,
        idx.len() as u64,
        idx.blocks.len() as u64,
        WEIGHT_BYTES,
        0,
    ] {
        put(&mut out, v);
    }

    let dir_at = out.len();
    out.resize(dir_at + idx.blocks.len() * 32, 0);
    for (i, b) in idx.blocks.iter().enumerate() {
        let section = out.len() as u64;
        let slot = dir_at + i * 32;
        for (j, v) in [b.c, b.ids.len() as u64, b.weights.len() as u64, section]
            .into_iter()
            .enumerate()
        {
            out[slot + 8 * j..slot + 8 * j + 8].copy_from_slice(&v.to_le_bytes());
        }
        for &id in &b.ids {
            put(&mut out, id);
        }
        put(&mut out, b.dims.len() as u64);
        for (&d, &e) in b.dims.iter().zip(&b.ends) {
            put(&mut out, d as u64);
            put(&mut out, e);
        }
        for &w in b.weights.values() {
            out.extend_from_slice(&w.to_le_bytes());
        }
        put(&mut out, b.levels.len() as u64);
        for l in &b.levels {
            put(&mut out, l.len() as u64);
            for &w in l.words() {
                put(&mut out, w);
            }
        }
    }
    let total = out.len() as u64 + 4;
    out[LENGTH_AT..LENGTH_AT + 8].copy_from_slice(&total.to_le_bytes());
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

pub fn write_index<W: Write>(idx: &SitadIndex, mut sink: W) -> Result<()> {
    sink.write_all(&to_bytes(idx))?;
    sink.flush()?;
    Ok(())
}

/// True if `bytes` starts with the index magic.
pub fn has_magic(bytes: &[u8]) -> bool {
    bytes.starts_with(MAGIC)
}

pub fn from_bytes(bytes: &[u8]) -> Result<SitadIndex> {
    if bytes.len() < 4 {
        return Err(if MAGIC.starts_with(bytes) {
            Error::Truncated
        } else {
            Error::BadMagic
        });
    }
    if !has_magic(bytes) {
        return Err(Error::BadMagic);
    }
    if bytes.len() < 8 {
        return Err(Error::Truncated);
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(Error::VersionMismatch {
            found: version,
            expected: VERSION,
        });
    }
    if bytes.len() < HEADER_END {
        return Err(Error::Truncated);
    }
    let declared = u64::from_le_bytes(bytes[LENGTH_AT..HEADER_END].try_into().unwrap());
    if (bytes.len() as u64) < declared {
        return Err(Error::Truncated);
    }
    if bytes.len() as u64 > declared || declared < HEADER_END as u64 + 4 {
        return Err(corrupt("file length"));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    if crc32fast::hash(body) != u32::from_le_bytes(tail.try_into().unwrap()) {
        return Err(Error::Checksum);
    }
    let mut r = Reader { buf: body, pos: 8 };
    let dimension = r.u64()?;
    let max_weight = r.u64()?;
    let n = r.u64()?;
    let nblocks = r.len_prefix(32)?;
    let weight_bytes = r.u64()?;
    r.u64()?;
    if weight_bytes != WEIGHT_BYTES {
        return Err(Error::Corrupt(format!("unsupported weight width {weight_bytes}")));
    }
    let dir: Vec<[u64; 4]> = (0..nblocks)
        .map(|_| Ok([r.u64()?, r.u64()?, r.u64()?, r.u64()?]))
        .collect::<Result<_>>()?;
    let dimension = u32::try_from(dimension).map_err(|_| corrupt("dimension"))?;
    let max_weight = u32::try_from(max_weight).map_err(|_| corrupt("max weight"))?;

    let mut blocks = Vec::with_capacity(nblocks);
    for &[c, n_ids, n_entries, section] in &dir {
        if section != r.pos as u64 {
            return Err(corrupt("block section offset"));
        }
        if blocks.last().is_some_and(|p: &SitadBlockIndex| p.c >= c) {
            return Err(corrupt("block norms not ascending"));
        }
        let n_ids = r.check_len(n_ids, 8)?;
        let ids: Vec<u64> = (0..n_ids).map(|_| r.u64()).collect::<Result<_>>()?;
        if n_ids == 0 || ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(corrupt("block ids"));
        }
        let n_dims = r.len_prefix(16)?;
        let mut dims = Vec::with_capacity(n_dims);
        let mut ends = Vec::with_capacity(n_dims);
        for _ in 0..n_dims {
            dims.push(u32::try_from(r.u64()?).map_err(|_| corrupt("dimension index"))?);
            ends.push(r.u64()?);
        }
        if dims.windows(2).any(|w| w[0] >= w[1])
            || ends.windows(2).any(|w| w[0] >= w[1])
            || ends.last() != Some(&n_entries)
            || ends.first() == Some(&0)
        {
            return Err(corrupt("dimension offsets"));
        }
        let n_entries = r.check_len(n_entries, 4)?;
        let weights: Vec<u32> = (0..n_entries).map(|_| r.u32()).collect::<Result<_>>()?;
        if weights.contains(&0) {
            return Err(corrupt("zero weight"));
        }
        let n_levels = r.len_prefix(8)?;
        let expect_levels = (usize::BITS - (n_ids - 1).leading_zeros()) as usize;
        if n_levels != expect_levels {
            return Err(corrupt("level count"));
        }
        let mut levels = Vec::with_capacity(n_levels);
        for _ in 0..n_levels {
            if r.u64()? != n_entries as u64 {
                return Err(corrupt("level length"));
            }
            let nw = n_entries.div_ceil(64);
            r.check_len(nw as u64, 8)?;
            let words: Vec<u64> = (0..nw).map(|_| r.u64()).collect::<Result<_>>()?;
            levels.push(RankBitVector::from_words(words, n_entries));
        }
        blocks.push(SitadBlockIndex {
            c,
            ids,
            dims,
            ends,
            weights: RmqIndex::new(weights),
            levels,
        });
    }
    if r.pos != body.len() {
        return Err(corrupt("trailing bytes"));
    }
    let idx = SitadIndex {
        dimension,
        max_weight,
        blocks,
    };
    if idx.len() as u64 != n {
        return Err(corrupt("descriptor count"));
    }
    Ok(idx)
}

pub fn read_index(path: &std::path::Path) -> Result<SitadIndex> {
    from_bytes(&std::fs::read(path)?)
}

fn corrupt(what: &str) -> Error {
    Error::Corrupt(what.to_string())
}

fn put(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(n).ok_or(Error::Truncated)?;
        let s = self.buf.get(self.pos..end).ok_or(Error::Truncated)?;
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    /// Checks that `count` items of `width` bytes fit in the remaining input.
    fn check_len(&self, count: u64, width: u64) -> Result<usize> {
        let bytes = count.checked_mul(width).ok_or(Error::Truncated)?;
        if bytes > (self.buf.len() - self.pos) as u64 {
            return Err(Error::Truncated);
        }
        Ok(count as usize)
    }

    fn len_prefix(&mut self, width: u64) -> Result<usize> {
        let n = self.u64()?;
        self.check_len(n, width)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::{Database, Descriptor};

    fn sample() -> SitadIndex {
        let recs = (1..=20u64)
            .map(|i| {
                let x =
                    Descriptor::from_pairs([(i as u32 % 7 + 1, 2), (i as u32 % 5 + 8, (i % 3) as u32 + 1)]).unwrap();
                (i, x)
            })
            .collect();
        SitadIndex::build(&Database::new(recs).unwrap())
    }

    #[test]
    fn round_trip_is_exact() {
        let idx = sample();
        let bytes = to_bytes(&idx);
        let back = from_bytes(&bytes).unwrap();
        assert_eq!(back, idx);
        assert_eq!(to_bytes(&back), bytes);
    }

    #[test]
    fn empty_index() {
        let idx = SitadIndex::build(&Database::default());
        let bytes = to_bytes(&idx);
        assert_eq!(bytes.len(), HEADER_END + 4);
        let back = from_bytes(&bytes).unwrap();
        assert!(back.is_empty());
    }

    #[test]
    fn rejects_damage() {
        let bytes = to_bytes(&sample());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(from_bytes(&bad), Err(Error::BadMagic)));
        assert!(matches!(from_bytes(b"hello world, not an index"), Err(Error::BadMagic)));

        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(matches!(from_bytes(&bad), Err(Error::VersionMismatch { found: 9, .. })));

        for cut in [2, 6, 30, bytes.len() / 2, bytes.len() - 5] {
            assert!(matches!(from_bytes(&bytes[..cut]), Err(Error::Truncated)), "cut {cut}");
        }

        let mut bad = bytes.clone();
        let mid = bytes.len() - 20;
        bad[mid] ^= 0x10;
        assert!(matches!(from_bytes(&bad), Err(Error::Checksum)));
    }
}
