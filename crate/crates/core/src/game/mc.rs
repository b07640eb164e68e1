//! Monte Carlo estimation of payoff tensors.
//!
//! Draws come from a ChaCha8 keystream addressed by sample index: sample `i`
//! always consumes the same words of the stream for a given seed, so any
//! split of the sample range into chunks tallies to identical counts.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::dist::{self, Rates};
use crate::error::{Error, Result};
use crate::game::tensor::{PayoffTensor, WinTable, DEFAULT_MAX_ENTRIES, MAX_TABLE_PROCESSES};
use crate::set::ProcessSet;

pub const MIN_SAMPLES: u64 = 10_000;

/// Largest `m` supported by the tally (it stores `4^m` counters).
pub const MAX_MC_PROCESSES: usize = 8;

/// Inverse-CDF sampler for one Poisson rate.
#[derive(Debug, Clone)]
struct InverseCdf {
    cdf: Vec<f64>,
}

impl InverseCdf {
    fn new(lambda: f64) -> Self {
        let y_max = dist::joint_truncation_point(&[lambda], 1e-17);
        let mut acc = 0.0;
        let cdf = dist::pmf_table(lambda, y_max)
            .into_iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        InverseCdf { cdf }
    }

    fn sample(&self, u: f64) -> u32 {
        let y = self.cdf.partition_point(|&c| c <= u);
        y.min(self.cdf.len() - 1) as u32
    }
}

fn unit(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Counts of winning subsets per chosen set over a range of samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McTally {
    m: usize,
    samples: u64,
    counts: Vec<u64>,
}

impl McTally {
    pub fn empty(m: usize) -> Self {
        McTally {
            m,
            samples: 0,
            counts: vec![0; 1 << (2 * m)],
        }
    }

    /// Tallies samples `start..end` of the stream keyed by `seed`.
    pub fn sample_range(rates: &Rates, seed: u64, start: u64, end: u64) -> Result<Self> {
        let m = rates.len();
        if m > MAX_MC_PROCESSES.min(MAX_TABLE_PROCESSES) {
            return Err(Error::Capacity {
                what: "options for Monte Carlo tallies",
                needed: m as u64,
                limit: MAX_MC_PROCESSES as u64,
            });
        }
        let samplers: Vec<InverseCdf> =
            rates.as_slice().iter().map(|&l| InverseCdf::new(l)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_word_pos(u128::from(start) * 2 * m as u128);

        let mut tally = McTally::empty(m);
        let subsets = 1usize << m;
        let mut y = vec![0u32; m];
        // Per chosen set: winning subset and the count it reached.
        let mut win = vec![0u32; subsets];
        let mut top = vec![0u32; subsets];
        for _ in start..end {
            for (slot, s) in y.iter_mut().zip(&samplers) {
                *slot = s.sample(unit(rng.next_u64()));
            }
            for c in 1..subsets {
                let j = c.trailing_zeros() as usize;
                let rest = c & (c - 1);
                let bit = 1u32 << j;
                if rest == 0 || y[j] > top[rest] {
                    win[c] = bit;
                    top[c] = y[j];
                } else if y[j] == top[rest] {
                    win[c] = win[rest] | bit;
                    top[c] = top[rest];
                } else {
                    win[c] = win[rest];
                    top[c] = top[rest];
                }
                tally.counts[(c << m) | win[c] as usize] += 1;
            }
        }
        tally.samples = end - start;
        Ok(tally)
    }

    pub fn merge(&mut self, other: &McTally) {
        debug_assert_eq!(self.m, other.m);
        self.samples += other.samples;
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    /// Empirical winning-set frequencies.
    pub fn win_table(&self) -> WinTable {
        let m = self.m;
        let total = self.samples as f64;
        let mut by_chosen = vec![Vec::new(); 1 << m];
        for chosen in ProcessSet::full(m).subsets() {
            let c = chosen.bits() as usize;
            by_chosen[c] = chosen
                .subsets()
                .filter_map(|w| {
                    let k = self.counts[(c << m) | w.bits() as usize];
                    (k > 0).then(|| (w, k as f64 / total))
                })
                .collect();
        }
        WinTable::from_raw(m, by_chosen)
    }

    /// Tensor of sample means with standard errors.
    pub fn into_tensor(self, n: usize) -> Result<PayoffTensor> {
        PayoffTensor::from_win_table(n, &self.win_table(), Some(self.samples), DEFAULT_MAX_ENTRIES)
    }
}

/// Monte Carlo payoff tensor with per-entry standard errors.
///
/// One pool of joint count draws is shared by every choice profile, so payoff
/// differences between entries carry correlated noise.
pub fn mc_payoff_tensor(n: usize, rates: &Rates, samples: u64, seed: u64) -> Result<PayoffTensor> {
    check_samples(samples)?;
    McTally::sample_range(rates, seed, 0, samples)?.into_tensor(n)
}

pub fn check_samples(samples: u64) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(Error::domain(alloc::format!(
            "at least {MIN_SAMPLES} samples are required, got {samples}"
        )));
    }
    Ok(())
}
