//! Subsets of finite carriers as bit sets.
//!
//! A [`BitSet`] always knows the size of the universe it lives in; the
//! lattice operations require both operands to share that size.  Bits are
//! stored little-endian in 64-bit words, so iteration order is the carrier
//! order and comparisons are cheap.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

impl BitSet {
    /// The empty subset of a universe with `len` elements.
    pub fn new(len: usize) -> Self {
        BitSet {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// The full subset of a universe with `len` elements.
    pub fn full(len: usize) -> Self {
        let mut s = BitSet::new(len);
        for i in 0..len {
            s.insert(i);
        }
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Self {
        let mut s = BitSet::new(len);
        for i in indices {
            s.insert(i);
        }
        s
    }

    /// The subset of `{0, .., len-1}` whose membership mask is the low
    /// `len` bits of `mask`.
    pub fn from_mask(len: usize, mask: u128) -> Self {
        debug_assert!(len <= 128);
        BitSet::from_indices(len, (0..len).filter(|i| mask >> i & 1 == 1))
    }

    pub fn universe_len(&self) -> usize {
        self.len
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} outside universe of {}", self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} outside universe of {}", self.len);
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn zip(&self, other: &BitSet, f: impl Fn(u64, u64) -> u64) -> BitSet {
        assert_eq!(self.len, other.len, "bit sets over different universes");
        BitSet {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    pub fn union(&self, other: &BitSet) -> BitSet {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &BitSet) -> BitSet {
        self.zip(other, |a, b| a & b)
    }

    pub fn minus(&self, other: &BitSet) -> BitSet {
        self.zip(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> BitSet {
        let mut out = self.clone();
        for (i, w) in out.words.iter_mut().enumerate() {
            *w = !*w;
            // Mask out the bits beyond the universe in the last word.
            let used = self.len.saturating_sub(i * 64).min(64);
            if used < 64 {
                *w &= (1u64 << used) - 1;
            }
        }
        out
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        assert_eq!(self.len, other.len, "bit sets over different universes");
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    /// Indices of the members, ascending.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |i| self.contains(*i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_ops() {
        let a = BitSet::from_indices(70, [0, 3, 69]);
        let b = BitSet::from_indices(70, [3, 5]);
        assert_eq!(a.intersection(&b), BitSet::from_indices(70, [3]));
        assert_eq!(a.union(&b), BitSet::from_indices(70, [0, 3, 5, 69]));
        assert_eq!(a.minus(&b), BitSet::from_indices(70, [0, 69]));
        assert!(BitSet::from_indices(70, [3]).is_subset(&a));
        assert!(!a.is_subset(&b));
        assert_eq!(a.complement().count(), 67);
        assert_eq!(a.complement().union(&a), BitSet::full(70));
    }

    #[test]
    fn complement_masks_tail_bits() {
        let s = BitSet::new(3).complement();
        assert_eq!(s, BitSet::full(3));
        assert_eq!(s.count(), 3);
        assert_eq!(s.complement(), BitSet::new(3));
    }

    #[test]
    fn mask_round_trip() {
        let s = BitSet::from_mask(5, 0b10110);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![1, 2, 4]);
        assert!(!s.contains(0));
        assert!(!s.contains(7));
    }
}
