use alloc::vec;
use alloc::vec::Vec;

use crate::dist::{self, Rates};
use crate::error::{Error, Result};
use crate::game::lattice::CountLattice;
use crate::game::partition::{OrderedPartition, OutcomeDistribution};
use crate::set::ProcessSet;
use crate::strategy::MixedStrategy;

/// Default bound on the number of count vectors in a tensor.
pub const DEFAULT_MAX_ENTRIES: u64 = 100_000;

/// Net payoff of each of `winners` agents splitting a pool of `n` units.
/// Everyone winning returns each stake exactly.
pub fn winner_share(n: u32, winners: u32) -> f64 {
    if winners == n {
        0.0
    } else {
        f64::from(n) / f64::from(winners) - 1.0
    }
}

/// One option per agent, 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PureProfile {
    m: usize,
    choices: Vec<usize>,
}

impl PureProfile {
    pub fn new(m: usize, choices: Vec<usize>) -> Result<Self> {
        if choices.len() < 2 {
            return Err(Error::domain("a profile needs at least two agents"));
        }
        if let Some(&c) = choices.iter().find(|&&c| c >= m) {
            return Err(Error::domain(alloc::format!("choice {c} is out of range")));
        }
        Ok(PureProfile { m, choices })
    }

    /// From 1-based option labels.
    pub fn from_labels(m: usize, labels: &[usize]) -> Result<Self> {
        if labels.contains(&0) {
            return Err(Error::domain("option labels start at 1"));
        }
        PureProfile::new(m, labels.iter().map(|l| l - 1).collect())
    }

    pub fn choices(&self) -> &[usize] {
        &self.choices
    }

    pub fn chosen(&self) -> ProcessSet {
        self.choices.iter().copied().collect()
    }

    pub fn counts(&self) -> Vec<u32> {
        let mut c = vec![0; self.m];
        for &j in &self.choices {
            c[j] += 1;
        }
        c
    }
}

/// Payoff of every agent once `partition` has been drawn.
pub fn realized_payoffs(profile: &PureProfile, partition: &OrderedPartition) -> Result<Vec<f64>> {
    if partition.m() != profile.m {
        return Err(Error::domain("partition and profile disagree on m"));
    }
    let winners = partition.winners(profile.chosen());
    let n = profile.choices.len() as u32;
    let k = profile.choices.iter().filter(|&&c| winners.contains(c)).count() as u32;
    let share = winner_share(n, k);
    Ok(profile
        .choices
        .iter()
        .map(|&c| if winners.contains(c) { share } else { -1.0 })
        .collect())
}

/// For every non-empty set `C` of chosen options, the distribution of the
/// winning subset `W ⊆ C`.
#[derive(Debug, Clone, PartialEq)]
pub struct WinTable {
    m: usize,
    by_chosen: Vec<Vec<(ProcessSet, f64)>>,
}

impl WinTable {
    pub(crate) fn from_raw(m: usize, by_chosen: Vec<Vec<(ProcessSet, f64)>>) -> Self {
        WinTable { m, by_chosen }
    }

    pub fn from_outcome(outcome: &OutcomeDistribution) -> Result<Self> {
        let m = outcome.m();
        check_table_size(m)?;
        let mut by_chosen = vec![Vec::new(); 1 << m];
        for chosen in ProcessSet::full(m).subsets() {
            let mut acc: Vec<(ProcessSet, f64)> = Vec::new();
            for (partition, w) in outcome.support() {
                let win = partition.winners(chosen);
                match acc.iter_mut().find(|(s, _)| *s == win) {
                    Some((_, p)) => *p += w,
                    None => acc.push((win, *w)),
                }
            }
            acc.sort_by_key(|(s, _)| *s);
            by_chosen[chosen.bits() as usize] = acc;
        }
        Ok(WinTable { m, by_chosen })
    }

    /// Exact table for independent Poisson counts, one argmax-set
    /// distribution per chosen set.
    pub fn from_rates(rates: &Rates, tol: f64) -> Result<Self> {
        let m = rates.len();
        check_table_size(m)?;
        let mut by_chosen = vec![Vec::new(); 1 << m];
        for chosen in ProcessSet::full(m).subsets() {
            by_chosen[chosen.bits() as usize] = dist::argmax_set_distribution(rates, chosen, tol)?
                .into_iter()
                .collect();
        }
        Ok(WinTable { m, by_chosen })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn winners(&self, chosen: ProcessSet) -> &[(ProcessSet, f64)] {
        &self.by_chosen[chosen.bits() as usize]
    }
}

/// Win tables are dense in `2^m`; cap `m` well below the bitmask width.
pub const MAX_TABLE_PROCESSES: usize = 12;

fn check_table_size(m: usize) -> Result<()> {
    if m > MAX_TABLE_PROCESSES {
        return Err(Error::Capacity {
            what: "options in a win table",
            needed: m as u64,
            limit: MAX_TABLE_PROCESSES as u64,
        });
    }
    Ok(())
}

/// Expected payoff of an agent picking each option, for every count vector
/// of `n` agents over `m` options.
///
/// The game is anonymous, so the count vector is a sufficient statistic and
/// each entry stores one payoff per option that at least one agent picked.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffTensor {
    lattice: CountLattice,
    payoffs: Vec<f64>,
    stderr: Option<Vec<f64>>,
}

impl PayoffTensor {
    /// Assembles a tensor from flat `entry * m + j` arrays in lattice order,
    /// checking the zero-sum and bounded-loss properties.
    pub fn from_parts(
        lattice: CountLattice,
        payoffs: Vec<f64>,
        stderr: Option<Vec<f64>>,
    ) -> Result<Self> {
        let n = lattice.n();
        let m = lattice.m();
        if n < 2 || m < 2 {
            return Err(Error::domain("a tensor needs n >= 2 and m >= 2"));
        }
        let len = lattice.level_len(n) * m;
        if payoffs.len() != len || stderr.as_ref().is_some_and(|s| s.len() != len) {
            return Err(Error::domain("payoff arrays do not match the lattice"));
        }
        let t = PayoffTensor {
            lattice,
            payoffs,
            stderr,
        };
        t.validate()?;
        Ok(t)
    }

    fn validate(&self) -> Result<()> {
        for idx in 0..self.len() {
            let counts = self.counts(idx);
            let mut sum = 0.0;
            for (j, &k) in counts.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let v = self.payoffs[idx * self.m() + j];
                if !v.is_finite() || v < -1.0 - 1e-12 {
                    return Err(Error::domain(alloc::format!(
                        "payoff {v} at {counts:?} is below the stake"
                    )));
                }
                sum += f64::from(k) * v;
            }
            if sum.abs() > 1e-10 {
                return Err(Error::domain(alloc::format!(
                    "entry {counts:?} is not zero-sum (total {sum})"
                )));
            }
        }
        Ok(())
    }

    /// Builds the tensor from a win table. With `samples`, the table holds
    /// empirical frequencies and per-entry standard errors are attached.
    pub fn from_win_table(
        n: usize,
        table: &WinTable,
        samples: Option<u64>,
        max_entries: u64,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("at least two agents are required"));
        }
        let m = table.m();
        let lattice = CountLattice::new(n, m, max_entries)?;
        let len = lattice.level_len(n);
        let mut payoffs = vec![0.0; len * m];
        let mut stderr = samples.map(|_| vec![0.0; len * m]);
        let n32 = n as u32;
        for (idx, counts) in lattice.level(n).enumerate() {
            let chosen: ProcessSet = (0..m).filter(|&j| counts[j] > 0).collect();
            for j in chosen.iter() {
                let (mut mean, mut second) = (0.0, 0.0);
                for &(win, p) in table.winners(chosen) {
                    let v = if win.contains(j) {
                        let k: u32 = win.iter().map(|i| counts[i]).sum();
                        winner_share(n32, k)
                    } else {
                        -1.0
                    };
                    mean += p * v;
                    second += p * v * v;
                }
                payoffs[idx * m + j] = mean;
                if let (Some(se), Some(s)) = (stderr.as_mut(), samples) {
                    let var = (second - mean * mean).max(0.0);
                    se[idx * m + j] = libm::sqrt(var / s as f64);
                }
            }
        }
        PayoffTensor::from_parts(lattice, payoffs, stderr)
    }

    pub fn n(&self) -> usize {
        self.lattice.n()
    }

    pub fn m(&self) -> usize {
        self.lattice.m()
    }

    /// Number of count vectors.
    pub fn len(&self) -> usize {
        self.lattice.level_len(self.n())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lattice(&self) -> &CountLattice {
        &self.lattice
    }

    pub fn counts(&self, idx: usize) -> &[u32] {
        self.lattice.counts(self.n(), idx)
    }

    pub fn index_of(&self, counts: &[u32]) -> Option<usize> {
        let total: u32 = counts.iter().sum();
        if total as usize != self.n() {
            return None;
        }
        self.lattice.index_of(counts)
    }

    /// Payoff of an agent on option `j` in entry `idx`; `None` if nobody picked `j`.
    pub fn payoff_at(&self, idx: usize, j: usize) -> Option<f64> {
        (self.counts(idx)[j] > 0).then(|| self.payoffs[idx * self.m() + j])
    }

    pub fn payoff(&self, counts: &[u32], j: usize) -> Option<f64> {
        self.payoff_at(self.index_of(counts)?, j)
    }

    pub fn stderr_at(&self, idx: usize, j: usize) -> Option<f64> {
        let se = self.stderr.as_ref()?;
        (self.counts(idx)[j] > 0).then(|| se[idx * self.m() + j])
    }

    pub fn has_stderr(&self) -> bool {
        self.stderr.is_some()
    }

    /// Unchecked read used on hot paths; callers guarantee `counts(idx)[j] > 0`.
    pub(crate) fn raw(&self, idx: usize, j: usize) -> f64 {
        self.payoffs[idx * self.m() + j]
    }

    /// Largest absolute payoff, used to put solver step sizes on a common scale.
    pub fn scale(&self) -> f64 {
        self.payoffs.iter().fold(0.0, |a, &b| f64::max(a, b.abs()))
    }

    /// Every payoff multiplied by `factor > 0`. The result is no longer a
    /// pool game, so the bounded-loss check is skipped.
    pub fn scaled(&self, factor: f64) -> PayoffTensor {
        PayoffTensor {
            lattice: self.lattice.clone(),
            payoffs: self.payoffs.iter().map(|v| v * factor).collect(),
            stderr: self
                .stderr
                .as_ref()
                .map(|s| s.iter().map(|v| v * factor).collect()),
        }
    }

    /// Expected payoff of each pure option for `agent`, the other agents
    /// playing `profile` independently.
    pub fn deviation_payoffs(&self, profile: &[MixedStrategy], agent: usize) -> Result<Vec<f64>> {
        self.check_profile(profile)?;
        if agent >= profile.len() {
            return Err(Error::domain("agent index out of range"));
        }
        let probs: Vec<&[f64]> = profile.iter().map(|s| s.probs()).collect();
        Ok(self.deviation_payoffs_raw(&probs, agent))
    }

    /// [`Self::deviation_payoffs`] on unchecked probability slices. The
    /// result is multilinear in the entries, which need not be on the simplex.
    pub(crate) fn deviation_payoffs_raw<S: AsRef<[f64]>>(&self, profile: &[S], agent: usize) -> Vec<f64> {
        let n = self.n();
        let m = self.m();
        let lat = &self.lattice;
        // Distribution over the count vectors of the other agents.
        let mut dist = vec![1.0];
        let mut r = 0;
        for (a, s) in profile.iter().enumerate() {
            if a == agent {
                continue;
            }
            let mut next = vec![0.0; lat.level_len(r + 1)];
            for (idx, &p) in dist.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                for (j, &q) in s.as_ref().iter().enumerate() {
                    if q != 0.0 {
                        next[lat.step(r, idx, j)] += p * q;
                    }
                }
            }
            dist = next;
            r += 1;
        }
        debug_assert_eq!(r, n - 1);
        let mut out = vec![0.0; m];
        for (idx, &p) in dist.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += p * self.raw(lat.step(n - 1, idx, j), j);
            }
        }
        out
    }

    /// Expected payoff of each pure option against `n - 1` opponents who all
    /// play `s`, summing multinomial weights over opponent count vectors.
    pub fn symmetric_deviation_payoffs(&self, s: &MixedStrategy) -> Result<Vec<f64>> {
        if s.len() != self.m() {
            return Err(Error::domain("strategy length does not match m"));
        }
        Ok(self.symmetric_deviation_payoffs_raw(s.probs()))
    }

    pub(crate) fn symmetric_deviation_payoffs_raw(&self, s: &[f64]) -> Vec<f64> {
        let m = self.m();
        let n = self.n();
        let lat = &self.lattice;
        let ln_fact = |k: u32| libm::lgamma(f64::from(k) + 1.0);
        let lead = ln_fact((n - 1) as u32);
        let mut out = vec![0.0; m];
        for (idx, counts) in lat.level(n - 1).enumerate() {
            let mut w = 1.0;
            let mut log_coef = lead;
            for (j, &k) in counts.iter().enumerate() {
                if k > 0 {
                    w *= libm::pow(s[j], f64::from(k));
                    log_coef -= ln_fact(k);
                }
            }
            if w == 0.0 {
                continue;
            }
            w *= libm::round(libm::exp(log_coef));
            for (j, o) in out.iter_mut().enumerate() {
                *o += w * self.raw(lat.step(n - 1, idx, j), j);
            }
        }
        out
    }

    fn check_profile(&self, profile: &[MixedStrategy]) -> Result<()> {
        if profile.len() != self.n() {
            return Err(Error::domain("profile length does not match n"));
        }
        if profile.iter().any(|s| s.len() != self.m()) {
            return Err(Error::domain("strategy length does not match m"));
        }
        Ok(())
    }
}

/// Exact tensor for a general winners-take-all pool.
pub fn exact_payoff_tensor(n: usize, outcome: &OutcomeDistribution) -> Result<PayoffTensor> {
    PayoffTensor::from_win_table(
        n,
        &WinTable::from_outcome(outcome)?,
        None,
        DEFAULT_MAX_ENTRIES,
    )
}

/// Exact tensor for a Poisson-picking pool, computed from argmax-set
/// distributions without enumerating partitions.
pub fn exact_poisson_tensor(n: usize, rates: &Rates, tol: f64) -> Result<PayoffTensor> {
    PayoffTensor::from_win_table(
        n,
        &WinTable::from_rates(rates, tol)?,
        None,
        DEFAULT_MAX_ENTRIES,
    )
}

/// Expected payoff of `agent` when everyone plays the given mixed profile.
pub fn expected_payoff(
    profile: &[MixedStrategy],
    tensor: &PayoffTensor,
    agent: usize,
) -> Result<f64> {
    let dev = tensor.deviation_payoffs(profile, agent)?;
    Ok(profile[agent]
        .probs()
        .iter()
        .zip(&dev)
        .map(|(p, d)| p * d)
        .sum())
}
