//! Fixed-width bitsets backed by `u64` words.
//!
//! Both derivation directions of a context work on these sets, so the
//! operations that matter are word-wise intersection, subset tests, and
//! iteration over set bits. The width is fixed at construction; binary
//! operations require equal widths.

use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    nbits: usize,
    words: Box<[u64]>,
}

impl BitSet {
    /// All-zero set over a universe of `nbits` elements.
    pub fn empty(nbits: usize) -> Self {
        BitSet {
            nbits,
            words: vec![0u64; nbits.div_ceil(64)].into_boxed_slice(),
        }
    }

    /// Set containing every element of the universe.
    pub fn full(nbits: usize) -> Self {
        let mut set = Self::empty(nbits);
        for w in set.words.iter_mut() {
            *w = u64::MAX;
        }
        set.clear_tail();
        set
    }

    pub fn from_indices(nbits: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(nbits);
        for i in indices {
            set.insert(i);
        }
        set
    }

    /// Size of the universe (not the number of set bits).
    pub fn width(&self) -> usize {
        self.nbits
    }

    pub fn insert(&mut self, index: usize) {
        assert!(
            index < self.nbits,
            "bit {index} out of range for width {}",
            self.nbits
        );
        self.words[index / 64] |= 1u64 << (index % 64);
    }

    pub fn remove(&mut self, index: usize) {
        assert!(
            index < self.nbits,
            "bit {index} out of range for width {}",
            self.nbits
        );
        self.words[index / 64] &= !(1u64 << (index % 64));
    }

    pub fn contains(&self, index: usize) -> bool {
        index < self.nbits && (self.words[index / 64] >> (index % 64)) & 1 == 1
    }

    /// Number of set bits.
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// `self ⊆ other`.
    pub fn is_subset(&self, other: &Self) -> bool {
        self.assert_same_width(other);
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(&a, &b)| a & !b == 0)
    }

    pub fn intersect_with(&mut self, other: &Self) {
        self.assert_same_width(other);
        for (a, &b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= b;
        }
    }

    pub fn union_with(&mut self, other: &Self) {
        self.assert_same_width(other);
        for (a, &b) in self.words.iter_mut().zip(other.words.iter()) {
            *a |= b;
        }
    }

    /// True when the two sets agree on every bit below `limit`.
    pub fn eq_below(&self, other: &Self, limit: usize) -> bool {
        self.assert_same_width(other);
        let limit = limit.min(self.nbits);
        let full_words = limit / 64;
        if self.words[..full_words] != other.words[..full_words] {
            return false;
        }
        let rem = limit % 64;
        if rem == 0 {
            return true;
        }
        let mask = (1u64 << rem) - 1;
        (self.words[full_words] ^ other.words[full_words]) & mask == 0
    }

    /// Lectic comparison under the fixed index order: of two distinct
    /// sets, the greater is the one containing the smallest index at
    /// which they differ.
    pub fn lectic_cmp(&self, other: &Self) -> Ordering {
        self.assert_same_width(other);
        for (&a, &b) in self.words.iter().zip(other.words.iter()) {
            if a != b {
                let low = (a ^ b).trailing_zeros();
                return if (a >> low) & 1 == 1 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                };
            }
        }
        Ordering::Equal
    }

    /// Iterator over set bit indices in ascending order.
    pub fn ones(&self) -> Ones<'_> {
        Ones {
            words: &self.words,
            word_idx: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    fn assert_same_width(&self, other: &Self) {
        assert_eq!(
            self.nbits, other.nbits,
            "bitset width mismatch: {} vs {}",
            self.nbits, other.nbits
        );
    }

    fn clear_tail(&mut self) {
        let rem = self.nbits % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.ones()).finish()
    }
}

pub struct Ones<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.current == 0 {
            self.word_idx += 1;
            self.current = *self.words.get(self.word_idx)?;
        }
        let bit = self.current.trailing_zeros() as usize;
        self.current &= self.current - 1;
        Some(self.word_idx * 64 + bit)
    }
}
