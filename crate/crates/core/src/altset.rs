//! Fixed-width set of alternative ids.

use std::fmt;

/// Largest universe the bit-set representation can hold.
pub const MAX_ALTERNATIVES: usize = 64;

/// A set of alternative ids in `0..64`, stored as a single machine word.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct AltSet(u64);

impl AltSet {
    pub const EMPTY: AltSet = AltSet(0);

    #[inline]
    pub const fn from_bits(bits: u64) -> Self {
        AltSet(bits)
    }

    #[inline]
    pub const fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn singleton(id: usize) -> Self {
        debug_assert!(id < MAX_ALTERNATIVES);
        AltSet(1u64 << id)
    }

    /// `{0, 1, ..., n-1}`.
    #[inline]
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_ALTERNATIVES);
        if n == MAX_ALTERNATIVES {
            AltSet(u64::MAX)
        } else {
            AltSet((1u64 << n) - 1)
        }
    }

    #[inline]
    pub fn contains(self, id: usize) -> bool {
        id < MAX_ALTERNATIVES && self.0 >> id & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, id: usize) {
        self.0 |= 1u64 << id;
    }

    #[inline]
    pub fn remove(&mut self, id: usize) {
        self.0 &= !(1u64 << id);
    }

    #[inline]
    pub fn with(self, id: usize) -> Self {
        AltSet(self.0 | 1u64 << id)
    }

    #[inline]
    pub fn without(self, id: usize) -> Self {
        AltSet(self.0 & !(1u64 << id))
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn union(self, other: AltSet) -> AltSet {
        AltSet(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: AltSet) -> AltSet {
        AltSet(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: AltSet) -> AltSet {
        AltSet(self.0 & !other.0)
    }

    #[inline]
    pub fn is_subset(self, other: AltSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn intersects(self, other: AltSet) -> bool {
        self.0 & other.0 != 0
    }

    /// Smallest member, if any.
    #[inline]
    pub fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    pub fn iter(self) -> Iter {
        Iter(self.0)
    }

    /// Lexicographic comparison of the sorted member lists.
    pub fn lex_cmp(self, other: AltSet) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        let mut a = self.iter();
        let mut b = other.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(x), Some(y)) if x != y => return x.cmp(&y),
                _ => {}
            }
        }
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

pub struct Iter(u64);

impl Iterator for Iter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let id = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(id)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Iter {}

impl IntoIterator for AltSet {
    type Item = usize;
    type IntoIter = Iter;

    fn into_iter(self) -> Iter {
        self.iter()
    }
}

impl FromIterator<usize> for AltSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = AltSet::EMPTY;
        for id in iter {
            s.insert(id);
        }
        s
    }
}

impl fmt::Debug for AltSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_algebra() {
        let a: AltSet = [0, 2, 5].into_iter().collect();
        let b: AltSet = [2, 3].into_iter().collect();
        assert_eq!(a.len(), 3);
        assert_eq!(a.intersection(b).to_vec(), vec![2]);
        assert_eq!(a.difference(b).to_vec(), vec![0, 5]);
        assert_eq!(a.union(b).to_vec(), vec![0, 2, 3, 5]);
        assert!(AltSet::singleton(2).is_subset(b));
        assert_eq!(AltSet::full(64).len(), 64);
        assert_eq!(a.first(), Some(0));
        assert_eq!(AltSet::EMPTY.first(), None);
    }

    #[test]
    fn lexicographic_order() {
        let s = |v: &[usize]| v.iter().copied().collect::<AltSet>();
        use std::cmp::Ordering::*;
        assert_eq!(s(&[0, 3]).lex_cmp(s(&[1, 2])), Less);
        assert_eq!(s(&[1, 2]).lex_cmp(s(&[1, 2, 3])), Less);
        assert_eq!(s(&[2]).lex_cmp(s(&[1, 9])), Greater);
        assert_eq!(s(&[4, 7]).lex_cmp(s(&[4, 7])), Equal);
    }
}
