use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Number of count vectors `(k_1..k_m)` with `Σ k_j = n`, i.e. `C(n+m-1, m-1)`.
/// `None` on overflow.
pub fn count_vectors(n: usize, m: usize) -> Option<u64> {
    if m == 0 {
        return Some(u64::from(n == 0));
    }
    let (top, k) = ((n + m - 1) as u128, (m - 1) as u128);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(top - i)? / (i + 1);
        if acc > u128::from(u64::MAX) {
            return None;
        }
    }
    u64::try_from(acc).ok()
}

/// All count vectors over `m` options for `0..=n` agents, with the
/// transition "one more agent picks option j" precomputed.
///
/// Level `r` lists the compositions of `r` in ascending lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct CountLattice {
    n: usize,
    m: usize,
    levels: Vec<Vec<u32>>,
    steps: Vec<Vec<u32>>,
}

impl CountLattice {
    pub fn new(n: usize, m: usize, max_entries: u64) -> Result<Self> {
        if n < 1 || m < 1 {
            return Err(Error::domain("lattice needs n >= 1 and m >= 1"));
        }
        let needed = count_vectors(n, m).unwrap_or(u64::MAX);
        if needed > max_entries {
            return Err(Error::Capacity {
                what: "payoff tensor entries",
                needed,
                limit: max_entries,
            });
        }
        let mut levels: Vec<Vec<u32>> = Vec::with_capacity(n + 1);
        let mut steps: Vec<Vec<u32>> = Vec::with_capacity(n);
        levels.push(alloc::vec![0; m]);
        for r in 0..n {
            let prev = &levels[r];
            let mut next: BTreeMap<Vec<u32>, u32> = BTreeMap::new();
            for counts in prev.chunks(m) {
                for j in 0..m {
                    let mut c = counts.to_vec();
                    c[j] += 1;
                    next.insert(c, 0);
                }
            }
            for (i, v) in next.values_mut().enumerate() {
                *v = i as u32;
            }
            let mut step = Vec::with_capacity(prev.len());
            for counts in prev.chunks(m) {
                for j in 0..m {
                    let mut c = counts.to_vec();
                    c[j] += 1;
                    step.push(next[&c]);
                }
            }
            steps.push(step);
            levels.push(next.into_keys().flatten().collect());
        }
        Ok(CountLattice { n, m, levels, steps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of count vectors with `r` agents.
    pub fn level_len(&self, r: usize) -> usize {
        self.levels[r].len() / self.m
    }

    pub fn counts(&self, r: usize, idx: usize) -> &[u32] {
        &self.levels[r][idx * self.m..(idx + 1) * self.m]
    }

    pub fn level(&self, r: usize) -> impl ExactSizeIterator<Item = &[u32]> {
        self.levels[r].chunks(self.m)
    }

    /// Index at level `r + 1` of `counts(r, idx) + e_j`.
    pub fn step(&self, r: usize, idx: usize, j: usize) -> usize {
        self.steps[r][idx * self.m + j] as usize
    }

    /// Position of `counts` in its level.
    pub fn index_of(&self, counts: &[u32]) -> Option<usize> {
        if counts.len() != self.m {
            return None;
        }
        let r: u32 = counts.iter().sum();
        let level = self.levels.get(r as usize)?;
        let len = level.len() / self.m;
        let (mut lo, mut hi) = (0, len);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match level[mid * self.m..(mid + 1) * self.m].cmp(counts) {
                core::cmp::Ordering::Less => lo = mid + 1,
                core::cmp::Ordering::Greater => hi = mid,
                core::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }
}
