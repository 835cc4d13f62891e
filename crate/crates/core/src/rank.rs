//! Rank dictionary over an immutable bit array.
//!
//! Positions are 1-based and `rank_b(i)` counts occurrences of `b` in
//! `B[1..=i]`, so `rank0(i) = i − rank1(i)` and `rank_b(0) = 0`.
//!
//! Layout: absolute counts sampled every 2¹⁶ bits as `u64`, counts relative
//! to the enclosing large block sampled at every 64-bit word as `u16`, and a
//! hardware popcount on the final partial word. Auxiliary space is 16 bits
//! per word plus 64 bits per 2¹⁶, i.e. about 0.25 extra bits per data bit.

use crate::error::{Error, Result};

const WORD: usize = 64;
const WORDS_PER_LARGE: usize = 1 << 10;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RankBitVector {
    len: usize,
    words: Vec<u64>,
    large: Vec<u64>,
    small: Vec<u16>,
}

impl RankBitVector {
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % WORD == 0 {
                words.push(0);
            }
            if b {
                *words.last_mut().unwrap() |= 1 << (len % WORD);
            }
            len += 1;
        }
        Self::from_words(words, len)
    }

    /// Wraps packed little-endian words (bit `k` of the array is bit `k % 64`
    /// of word `k / 64`). Bits past `len` are cleared.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        words.resize(len.div_ceil(WORD), 0);
        if !len.is_multiple_of(WORD) {
            let last = words.len() - 1;
            words[last] &= (1u64 << (len % WORD)) - 1;
        }
        let mut large = Vec::with_capacity(words.len() / WORDS_PER_LARGE + 1);
        let mut small = Vec::with_capacity(words.len() + 1);
        let mut total = 0u64;
        let mut base = 0u64;
        // One sample past the last word so rank1(len) needs no special case.
        for w in 0..=words.len() {
            if w % WORDS_PER_LARGE == 0 {
                large.push(total);
                base = total;
            }
            small.push((total - base) as u16);
            if let Some(word) = words.get(w) {
                total += word.count_ones() as u64;
            }
        }
        RankBitVector {
            len,
            words,
            large,
            small,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Bit at 1-based position `i`.
    pub fn get(&self, i: usize) -> bool {
        assert!(i >= 1 && i <= self.len, "position {i} out of range 1..={}", self.len);
        let k = i - 1;
        self.words[k / WORD] >> (k % WORD) & 1 == 1
    }

    /// Number of ones in `B[1..=i]`. Panics if `i > len`.
    #[inline]
    pub fn rank1(&self, i: usize) -> usize {
        assert!(i <= self.len, "rank position {i} exceeds length {}", self.len);
        let w = i / WORD;
        let mut r = self.large[w / WORDS_PER_LARGE] as usize + self.small[w] as usize;
        let rem = i % WORD;
        if rem != 0 {
            r += (self.words[w] & ((1u64 << rem) - 1)).count_ones() as usize;
        }
        r
    }

    /// Number of zeros in `B[1..=i]`. Panics if `i > len`.
    #[inline]
    pub fn rank0(&self, i: usize) -> usize {
        i - self.rank1(i)
    }

    pub fn try_rank1(&self, i: usize) -> Result<usize> {
        self.check(i).map(|_| self.rank1(i))
    }

    pub fn try_rank0(&self, i: usize) -> Result<usize> {
        self.check(i).map(|_| self.rank0(i))
    }

    fn check(&self, i: usize) -> Result<()> {
        if i > self.len {
            Err(Error::OutOfRange {
                index: i,
                len: self.len,
            })
        } else {
            Ok(())
        }
    }

    pub fn count_ones(&self) -> usize {
        self.rank1(self.len)
    }

    /// Bytes held by the packed bits.
    pub fn data_bytes(&self) -> usize {
        self.words.len() * 8
    }

    /// Bytes held by the rank samples.
    pub fn aux_bytes(&self) -> usize {
        self.large.len() * 8 + self.small.len() * 2
    }
}
