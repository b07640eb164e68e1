use alloc::vec;
use alloc::vec::Vec;

use crate::dist::{self, Rates};
use crate::error::{Error, Result};
use crate::set::{ProcessSet, MAX_PROCESSES};

/// A ranking of the options `{0..m-1}`: disjoint non-empty blocks, best first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrderedPartition {
    m: usize,
    blocks: Vec<ProcessSet>,
}

impl OrderedPartition {
    pub fn new(m: usize, blocks: Vec<ProcessSet>) -> Result<Self> {
        if !(2..=MAX_PROCESSES).contains(&m) {
            return Err(Error::domain("ordered partitions need 2 <= m <= 32"));
        }
        let mut seen = ProcessSet::EMPTY;
        for &b in &blocks {
            if b.is_empty() {
                return Err(Error::domain("ordered partition has an empty block"));
            }
            if !b.intersection(seen).is_empty() {
                return Err(Error::domain("ordered partition blocks overlap"));
            }
            seen = seen.union(b);
        }
        if seen != ProcessSet::full(m) {
            return Err(Error::domain("ordered partition does not cover every option"));
        }
        Ok(OrderedPartition { m, blocks })
    }

    /// Builds a partition from 1-based option labels, e.g. `[[5], [1, 2]]`.
    pub fn from_labels(m: usize, blocks: &[&[usize]]) -> Result<Self> {
        let mut sets = Vec::with_capacity(blocks.len());
        for block in blocks {
            let mut s = ProcessSet::EMPTY;
            for &label in *block {
                if label == 0 || label > m {
                    return Err(Error::domain("option label out of range"));
                }
                s.insert(label - 1);
            }
            sets.push(s);
        }
        OrderedPartition::new(m, sets)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn blocks(&self) -> &[ProcessSet] {
        &self.blocks
    }

    /// The chosen options that win: the first block meeting `chosen`,
    /// restricted to `chosen`. Empty only if `chosen` is empty.
    pub fn winners(&self, chosen: ProcessSet) -> ProcessSet {
        self.blocks
            .iter()
            .map(|b| b.intersection(chosen))
            .find(|w| !w.is_empty())
            .unwrap_or(ProcessSet::EMPTY)
    }
}

/// A finite-support distribution over ordered partitions of the same ground set.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    m: usize,
    support: Vec<(OrderedPartition, f64)>,
}

impl OutcomeDistribution {
    pub fn new(support: Vec<(OrderedPartition, f64)>) -> Result<Self> {
        let Some((first, _)) = support.first() else {
            return Err(Error::domain("outcome distribution has empty support"));
        };
        let m = first.m();
        let mut total = 0.0;
        for (p, w) in &support {
            if p.m() != m {
                return Err(Error::domain("partitions are over different ground sets"));
            }
            if !(w.is_finite() && *w > 0.0) {
                return Err(Error::domain("outcome weights must be positive"));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(alloc::format!(
                "outcome weights sum to {total}, expected 1"
            )));
        }
        Ok(OutcomeDistribution { m, support })
    }

    /// Two options, no ties: option 1 ranks first with probability `p_first`.
    pub fn two_way(p_first: f64) -> Result<Self> {
        let a = OrderedPartition::from_labels(2, &[&[1], &[2]])?;
        let b = OrderedPartition::from_labels(2, &[&[2], &[1]])?;
        let mut support = Vec::new();
        if p_first > 0.0 {
            support.push((a, p_first));
        }
        if p_first < 1.0 {
            support.push((b, 1.0 - p_first));
        }
        OutcomeDistribution::new(support)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn support(&self) -> &[(OrderedPartition, f64)] {
        &self.support
    }

    /// Weight of a given partition (0 if it is not in the support).
    pub fn weight(&self, partition: &OrderedPartition) -> f64 {
        self.support
            .iter()
            .filter(|(p, _)| p == partition)
            .map(|(_, w)| w)
            .sum()
    }
}

/// Largest `m` for which [`induced_outcome_distribution`] enumerates partitions.
pub const MAX_INDUCED_PROCESSES: usize = 6;

/// Every ordered partition of `{0..m-1}`.
pub fn all_ordered_partitions(m: usize) -> Vec<Vec<ProcessSet>> {
    fn extend(rest: ProcessSet, prefix: &mut Vec<ProcessSet>, out: &mut Vec<Vec<ProcessSet>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for block in rest.subsets() {
            prefix.push(block);
            extend(rest.difference(block), prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(ProcessSet::full(m), &mut Vec::new(), &mut out);
    out
}

/// The ranking distribution produced by one draw of each Poisson process:
/// level sets of the counts, ordered from the highest count down.
pub fn induced_outcome_distribution(rates: &Rates, tol: f64) -> Result<OutcomeDistribution> {
    let m = rates.len();
    if m > MAX_INDUCED_PROCESSES {
        return Err(Error::Capacity {
            what: "exact outcome distribution (use the Monte Carlo path)",
            needed: m as u64,
            limit: MAX_INDUCED_PROCESSES as u64,
        });
    }
    if !(tol > 0.0 && tol <= 1e-8) {
        return Err(Error::domain("tolerance must lie in (0, 1e-8]"));
    }
    let y_max = dist::joint_truncation_point(rates.as_slice(), tol);
    let len = y_max as usize + 1;
    let tables: Vec<Vec<f64>> = rates
        .as_slice()
        .iter()
        .map(|&l| dist::pmf_table(l, y_max))
        .collect();
    let level_mass = |block: ProcessSet, y: usize| -> f64 {
        block.iter().map(|i| tables[i][y]).product()
    };

    let mut support = Vec::new();
    let mut total = 0.0;
    let mut h = vec![0.0; len];
    for blocks in all_ordered_partitions(m) {
        // h(y): probability that the blocks from the current one down all sit
        // at strictly decreasing levels with the current block at level y.
        let last = blocks[blocks.len() - 1];
        for (y, slot) in h.iter_mut().enumerate() {
            *slot = level_mass(last, y);
        }
        for &block in blocks.iter().rev().skip(1) {
            let mut below = 0.0;
            for y in 0..len {
                let here = h[y];
                h[y] = level_mass(block, y) * below;
                below += here;
            }
        }
        let w: f64 = h.iter().sum();
        total += w;
        if w > 0.0 {
            support.push((OrderedPartition { m, blocks }, w));
        }
    }
    for (_, w) in support.iter_mut() {
        *w /= total;
    }
    OutcomeDistribution::new(support)
}
