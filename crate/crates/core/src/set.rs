use core::fmt;

/// A set of process indices (0-based) packed into a bitmask.
///
/// With the `serde` feature it serializes as the ascending list of members.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(into = "alloc::vec::Vec<usize>", try_from = "alloc::vec::Vec<usize>")
)]
pub struct ProcessSet(u32);

/// Largest number of processes a [`ProcessSet`] can hold.
pub const MAX_PROCESSES: usize = 32;

impl ProcessSet {
    pub const EMPTY: ProcessSet = ProcessSet(0);

    pub const fn from_bits(bits: u32) -> Self {
        ProcessSet(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub fn singleton(j: usize) -> Self {
        debug_assert!(j < MAX_PROCESSES);
        ProcessSet(1 << j)
    }

    /// `{0, .., m-1}`.
    pub fn full(m: usize) -> Self {
        debug_assert!(m <= MAX_PROCESSES);
        if m == MAX_PROCESSES {
            ProcessSet(u32::MAX)
        } else {
            ProcessSet((1u32 << m) - 1)
        }
    }

    pub fn contains(self, j: usize) -> bool {
        j < MAX_PROCESSES && self.0 & (1 << j) != 0
    }

    pub fn insert(&mut self, j: usize) {
        self.0 |= 1 << j;
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: Self) -> Self {
        ProcessSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        ProcessSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        ProcessSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        core::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let j = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(j)
            }
        })
    }

    /// All non-empty subsets of `self`, in increasing bit order.
    pub fn subsets(self) -> impl Iterator<Item = ProcessSet> {
        let full = self.0;
        let mut sub: u32 = 0;
        let mut done = full == 0;
        core::iter::from_fn(move || {
            if done {
                return None;
            }
            sub = sub.wrapping_sub(full) & full;
            if sub == 0 {
                done = true;
                None
            } else {
                Some(ProcessSet(sub))
            }
        })
    }
}

impl FromIterator<usize> for ProcessSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = ProcessSet::EMPTY;
        for j in iter {
            set.insert(j);
        }
        set
    }
}

impl From<ProcessSet> for alloc::vec::Vec<usize> {
    fn from(s: ProcessSet) -> Self {
        s.iter().collect()
    }
}

impl TryFrom<alloc::vec::Vec<usize>> for ProcessSet {
    type Error = crate::Error;

    fn try_from(members: alloc::vec::Vec<usize>) -> crate::Result<Self> {
        if members.iter().any(|&j| j >= MAX_PROCESSES) {
            return Err(crate::Error::domain("process index out of range"));
        }
        Ok(members.into_iter().collect())
    }
}

impl fmt::Debug for ProcessSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn subsets_enumerates_all_nonempty() {
        let s: ProcessSet = [0, 2, 3].into_iter().collect();
        let subs: Vec<_> = s.subsets().collect();
        assert_eq!(subs.len(), 7);
        assert!(subs.iter().all(|x| x.is_subset(s) && !x.is_empty()));
        assert_eq!(ProcessSet::EMPTY.subsets().count(), 0);
    }

    #[test]
    fn iter_is_ascending() {
        let s = ProcessSet::from_bits(0b1011_0000);
        assert_eq!(s.iter().collect::<Vec<_>>(), [4, 5, 7]);
        assert_eq!(ProcessSet::full(3).bits(), 0b111);
    }
}
