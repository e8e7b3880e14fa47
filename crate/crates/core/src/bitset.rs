//! Fixed-width bit sets. Committees are bit sets over candidate indices,
//! approver sets are bit sets over voter indices.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A set of indices drawn from `0..width`, stored as a bit mask.
///
/// Widths above 64 are supported with the same semantics; operations that
/// combine two sets require equal widths.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    width: usize,
    words: Vec<u64>,
}

fn word_count(width: usize) -> usize {
    width.div_ceil(64).max(1)
}

impl BitSet {
    pub fn empty(width: usize) -> Self {
        BitSet { width, words: vec![0; word_count(width)] }
    }

    pub fn full(width: usize) -> Self {
        let mut s = Self::empty(width);
        for i in 0..width {
            s.insert(i);
        }
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(width: usize, indices: I) -> Result<Self> {
        let mut s = Self::empty(width);
        for i in indices {
            if i >= width {
                return Err(Error::InvalidElection(format!(
                    "index {i} out of range (width {width})"
                )));
            }
            s.insert(i);
        }
        Ok(s)
    }

    /// Builds a set from the low `width` bits of `mask`. Width at most 64.
    pub fn from_word(width: usize, mask: u64) -> Self {
        debug_assert!(width <= 64);
        debug_assert!(width == 64 || mask < (1u64 << width));
        let mut words = vec![0; word_count(width)];
        words[0] = mask;
        BitSet { width, words }
    }

    /// The single-word mask. Width at most 64.
    pub fn as_word(&self) -> u64 {
        debug_assert!(self.width <= 64);
        self.words[0]
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.width);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.width, "index {i} out of range (width {})", self.width);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        debug_assert!(i < self.width);
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn union(&self, other: &BitSet) -> BitSet {
        self.zip_words(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &BitSet) -> BitSet {
        self.zip_words(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &BitSet) -> BitSet {
        self.zip_words(other, |a, b| a & !b)
    }

    pub fn union_assign(&mut self, other: &BitSet) {
        assert_eq!(self.width, other.width);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn difference_assign(&mut self, other: &BitSet) {
        assert_eq!(self.width, other.width);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    /// Complement relative to the full index range `0..width`.
    pub fn complement(&self) -> BitSet {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        let tail = self.width % 64;
        if tail != 0 {
            *words.last_mut().unwrap() &= (1u64 << tail) - 1;
        }
        if self.width == 0 {
            words[0] = 0;
        }
        BitSet { width: self.width, words }
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        assert_eq!(self.width, other.width);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersection_len(&self, other: &BitSet) -> usize {
        assert_eq!(self.width, other.width);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn iter(&self) -> Ones<'_> {
        Ones { words: &self.words, word_idx: 0, current: self.words[0] }
    }

    pub fn to_indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    fn zip_words(&self, other: &BitSet, f: impl Fn(u64, u64) -> u64) -> BitSet {
        assert_eq!(self.width, other.width, "width mismatch");
        let words = self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect();
        BitSet { width: self.width, words }
    }
}

/// Sets order by their sorted index sequences, so among committees of equal
/// size the one whose lowest differing member is smaller comes first.
impl Ord for BitSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for BitSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
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
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_idx];
        }
        let bit = self.current.trailing_zeros() as usize;
        self.current &= self.current - 1;
        Some(self.word_idx * 64 + bit)
    }
}
