use std::fmt;
use std::ops::{BitAnd, BitXor, BitXorAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

/// A subset of the edge indices `0..len`, i.e. a vector of the edge space.
///
/// Addition in the edge space is symmetric difference (`^`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EdgeSubset {
    len: usize,
    words: SmallVec<[u64; 2]>,
}

impl EdgeSubset {
    pub fn empty(len: usize) -> Self {
        Self {
            len,
            words: SmallVec::from_elem(0, len.div_ceil(64).max(1)),
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::empty(len);
        for i in 0..len {
            s.insert(i);
        }
        s
    }

    /// Bit `i` of `mask` selects edge `i`.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len >= 64 || mask >> len == 0, "mask has bits beyond {len}");
        let mut s = Self::empty(len);
        s.words[0] = mask;
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Self {
        let mut s = Self::empty(len);
        for i in indices {
            s.insert(i);
        }
        s
    }

    /// The subset as a single-word mask, when the universe fits in 64 bits.
    pub fn mask(&self) -> Option<u64> {
        (self.len <= 64).then(|| self.words[0])
    }

    /// Size of the universe (the number of edges).
    pub fn universe(&self) -> usize {
        self.len
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "edge {i} outside universe of {}", self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn toggle(&mut self, i: usize) {
        assert!(i < self.len, "edge {i} outside universe of {}", self.len);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    /// Size of the intersection; parity gives the edge-space inner product.
    pub fn intersection_count(&self, other: &Self) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn complement(&self) -> Self {
        let mut out = Self::full(self.len);
        out ^= self;
        out
    }

    /// Highest edge index in the set.
    pub fn leading(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }
}

impl BitXorAssign<&EdgeSubset> for EdgeSubset {
    fn bitxor_assign(&mut self, rhs: &EdgeSubset) {
        assert_eq!(self.len, rhs.len, "edge universes differ");
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
    }
}

impl BitXor for &EdgeSubset {
    type Output = EdgeSubset;
    fn bitxor(self, rhs: &EdgeSubset) -> EdgeSubset {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

impl BitAnd for &EdgeSubset {
    type Output = EdgeSubset;
    fn bitand(self, rhs: &EdgeSubset) -> EdgeSubset {
        assert_eq!(self.len, rhs.len, "edge universes differ");
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&rhs.words) {
            *a &= b;
        }
        out
    }
}

impl PartialOrd for EdgeSubset {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EdgeSubset {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl fmt::Debug for EdgeSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.indices()).finish()
    }
}

impl Serialize for EdgeSubset {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.indices())
    }
}

/// Deserializes from a list of indices; the universe is set to one past the
/// largest index and should be widened with [`EdgeSubset::with_universe`].
impl<'de> Deserialize<'de> for EdgeSubset {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let indices = Vec::<usize>::deserialize(deserializer)?;
        let len = indices.iter().max().map_or(0, |m| m + 1);
        Ok(Self::from_indices(len, indices))
    }
}

impl EdgeSubset {
    pub fn with_universe(&self, len: usize) -> Option<Self> {
        if self.indices().any(|i| i >= len) {
            return None;
        }
        Some(Self::from_indices(len, self.indices()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_is_symmetric_difference() {
        let a = EdgeSubset::from_indices(70, [0, 3, 65]);
        let b = EdgeSubset::from_indices(70, [3, 4, 69]);
        let c = &a ^ &b;
        assert_eq!(c.indices().collect::<Vec<_>>(), vec![0, 4, 65, 69]);
        assert_eq!(a.intersection_count(&b), 1);
        assert_eq!(c.leading(), Some(69));
        assert_eq!(c.mask(), None);
    }

    #[test]
    fn masks_round_trip() {
        let s = EdgeSubset::from_mask(5, 0b10110);
        assert_eq!(s.mask(), Some(0b10110));
        assert_eq!(s.count(), 3);
        assert_eq!(s.complement().mask(), Some(0b01001));
        assert!(EdgeSubset::from_mask(5, 0b00110).is_subset(&s));
    }
}
