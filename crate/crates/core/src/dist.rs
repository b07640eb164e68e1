//! Probabilities for independent Poisson counts observed over one time unit.
//!
//! Every sum here runs upward in the count `y` and stops once a rigorous upper
//! bound on the probability mass that has not been visited yet drops below the
//! caller's tolerance. Masses are evaluated in log space and exponentiated once
//! per term, so rates in the hundreds are fine.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::set::{ProcessSet, MAX_PROCESSES};

/// Default truncation tolerance for the tail sums.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Hard stop for the count loop. Rates that need more terms than this are
/// far outside anything the model is used for.
const MAX_COUNT: u32 = 1_000_000;

/// Rates `λ_1..λ_m` of the independent Poisson processes.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "Vec<f64>", into = "Vec<f64>"))]
pub struct Rates(Vec<f64>);

impl Rates {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if lambda.len() < 2 {
            return Err(Error::domain("at least two processes are required"));
        }
        if lambda.len() > MAX_PROCESSES {
            return Err(Error::domain("too many processes"));
        }
        for (j, &l) in lambda.iter().enumerate() {
            check_rate(l).map_err(|_| {
                Error::domain(alloc::format!("rate {} is {l}, must be positive and finite", j + 1))
            })?;
        }
        Ok(Rates(lambda))
    }

    /// `λ_j = k^(j-1) + offset` for `j = 1..=m`.
    pub fn geometric(k: f64, m: usize, offset: f64) -> Result<Self> {
        let mut lambda = Vec::with_capacity(m);
        let mut r = 1.0;
        for _ in 0..m {
            lambda.push(r + offset);
            r *= k;
        }
        Rates::new(lambda)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, j: usize) -> f64 {
        self.0[j]
    }

    /// Indices attaining the maximal rate, ascending.
    pub fn argmax(&self) -> ProcessSet {
        let max = self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == max)
            .map(|(j, _)| j)
            .collect()
    }
}

impl TryFrom<Vec<f64>> for Rates {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Rates::new(v)
    }
}

impl From<Rates> for Vec<f64> {
    fn from(r: Rates) -> Self {
        r.0
    }
}

fn check_rate(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(alloc::format!(
            "Poisson rate must be positive and finite, got {lambda}"
        )))
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol <= 1e-8 {
        Ok(())
    } else {
        Err(Error::domain(alloc::format!(
            "tolerance must lie in (0, 1e-8], got {tol}"
        )))
    }
}

fn ln_pmf(lambda: f64, y: u32) -> f64 {
    let y = f64::from(y);
    -lambda + y * libm::log(lambda) - libm::lgamma(y + 1.0)
}

/// `P(Y = y)` for `Y ~ Poisson(lambda)`.
pub fn poisson_pmf(lambda: f64, y: u32) -> Result<f64> {
    check_rate(lambda)?;
    Ok(libm::exp(ln_pmf(lambda, y)))
}

/// Upper bound on `P(Y > y)`.
///
/// Past the mode the mass ratio `pmf(x+1)/pmf(x) = λ/(x+1)` is below
/// `λ/(y+2)` for every `x > y`, so the tail is dominated by a geometric series
/// started at `pmf(y+1)`. Before that point the trivial bound 1 is returned.
fn tail_bound(lambda: f64, y: u32) -> f64 {
    let next = f64::from(y) + 2.0;
    if next <= lambda {
        return 1.0;
    }
    libm::exp(ln_pmf(lambda, y + 1)) * next / (next - lambda)
}

/// Walks the counts `y = 0, 1, ..` yielding `pmf(y)` and `P(Y < y)`.
struct CountWalker {
    lambda: f64,
    below: f64,
}

impl CountWalker {
    fn new(lambda: f64) -> Self {
        CountWalker { lambda, below: 0.0 }
    }

    /// Returns `(pmf(y), P(Y < y))` and advances the running CDF.
    fn step(&mut self, y: u32) -> (f64, f64) {
        let p = libm::exp(ln_pmf(self.lambda, y));
        let below = self.below;
        self.below += p;
        (p, below)
    }
}

/// Outcome probabilities for a pair of independent counts `Y_a`, `Y_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonProbs {
    pub p_gt: f64,
    pub p_lt: f64,
    pub p_eq: f64,
    /// `p_gt / p_lt`.
    pub odds_ratio: f64,
}

/// Probabilities that `Y_a` beats, loses to, or ties `Y_b`.
///
/// The three masses are summed directly with formulas that are mirror images
/// under swapping `a` and `b`, then normalized by their common total, so
/// `compare(a, b).p_gt == compare(b, a).p_lt` holds bit for bit.
pub fn compare(lambda_a: f64, lambda_b: f64, tol: f64) -> Result<ComparisonProbs> {
    check_rate(lambda_a)?;
    check_rate(lambda_b)?;
    check_tol(tol)?;
    let mut wa = CountWalker::new(lambda_a);
    let mut wb = CountWalker::new(lambda_b);
    let (mut gt, mut lt, mut eq) = (0.0, 0.0, 0.0);
    let mut y = 0;
    loop {
        let (pa, below_a) = wa.step(y);
        let (pb, below_b) = wb.step(y);
        gt += pa * below_b;
        lt += pb * below_a;
        eq += pa * pb;
        if tail_bound(lambda_a, y) + tail_bound(lambda_b, y) < tol || y >= MAX_COUNT {
            break;
        }
        y += 1;
    }
    let total = gt + lt + eq;
    let (p_gt, p_lt, p_eq) = (gt / total, lt / total, eq / total);
    Ok(ComparisonProbs {
        p_gt,
        p_lt,
        p_eq,
        odds_ratio: p_gt / p_lt,
    })
}

/// Distribution of the set of `chosen` processes that attain the largest
/// count among `chosen`.
///
/// For each non-empty `S ⊆ chosen` the returned probability is
/// `Σ_y Π_{i∈S} P(Y_i = y) · Π_{i∈chosen∖S} P(Y_i < y)`.
pub fn argmax_set_distribution(
    rates: &Rates,
    chosen: ProcessSet,
    tol: f64,
) -> Result<BTreeMap<ProcessSet, f64>> {
    check_tol(tol)?;
    if chosen.is_empty() {
        return Err(Error::domain("the chosen set of processes is empty"));
    }
    if chosen.iter().any(|j| j >= rates.len()) {
        return Err(Error::domain("chosen set refers to a process that does not exist"));
    }
    let members: Vec<usize> = chosen.iter().collect();
    let k = members.len();
    let mut walkers: Vec<CountWalker> = members
        .iter()
        .map(|&j| CountWalker::new(rates.get(j)))
        .collect();

    // acc[sub] is indexed by a bitmask over positions in `members`.
    let mut acc = vec![0.0; 1 << k];
    let mut term = vec![0.0; 1 << k];
    let mut y = 0;
    loop {
        term[0] = 1.0;
        for (pos, w) in walkers.iter_mut().enumerate() {
            let (p, below) = w.step(y);
            let half = 1 << pos;
            for sub in 0..half {
                let t = term[sub];
                term[sub] = t * below;
                term[sub | half] = t * p;
            }
        }
        for sub in 1..(1 << k) {
            acc[sub] += term[sub];
        }
        let residual: f64 = members
            .iter()
            .map(|&j| tail_bound(rates.get(j), y))
            .sum();
        if residual < tol || y >= MAX_COUNT {
            break;
        }
        y += 1;
    }

    let total: f64 = acc[1..].iter().sum();
    let mut out = BTreeMap::new();
    for (sub, &mass) in acc.iter().enumerate().skip(1) {
        let set: ProcessSet = members
            .iter()
            .enumerate()
            .filter(|(pos, _)| sub & (1 << pos) != 0)
            .map(|(_, &j)| j)
            .collect();
        out.insert(set, mass / total);
    }
    Ok(out)
}

/// Smallest count `y` such that every process has `P(Y_i > y)` summing below `tol`.
pub(crate) fn joint_truncation_point(rates: &[f64], tol: f64) -> u32 {
    let mut y = 0;
    while y < MAX_COUNT {
        let residual: f64 = rates.iter().map(|&l| tail_bound(l, y)).sum();
        if residual < tol {
            break;
        }
        y += 1;
    }
    y
}

/// `pmf(λ, 0..=y_max)` evaluated in log space.
pub(crate) fn pmf_table(lambda: f64, y_max: u32) -> Vec<f64> {
    (0..=y_max).map(|y| libm::exp(ln_pmf(lambda, y))).collect()
}
