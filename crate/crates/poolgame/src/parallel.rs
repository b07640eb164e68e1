//! Multi-threaded versions of the expensive core loops.
//!
//! Each one splits work into pieces the core can compute independently and
//! recombines them in a fixed order, so results are bit-identical to the
//! single-threaded functions for any thread count.

use poolgame_core::analytic::{self, BoundaryPoint, ConjectureReport};
use poolgame_core::dist::Rates;
use poolgame_core::game::{check_samples, McTally, PayoffTensor};
use poolgame_core::solver::{ensemble_run, DiversificationMetric, Sampler};
use rayon::prelude::*;

use crate::{grid, Error, Result};

/// Samples per Monte Carlo work unit.
pub const MC_CHUNK: u64 = 1 << 16;

/// Same result as `game::mc_payoff_tensor`.
pub fn mc_payoff_tensor(n: usize, rates: &Rates, samples: u64, seed: u64) -> Result<PayoffTensor> {
    check_samples(samples)?;
    let chunks = samples.div_ceil(MC_CHUNK);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * MC_CHUNK;
            McTally::sample_range(rates, seed, start, (start + MC_CHUNK).min(samples))
        })
        .try_reduce(
            || McTally::empty(rates.len()),
            |mut a, b| {
                a.merge(&b);
                Ok(a)
            },
        )?;
    Ok(tally.into_tensor(n)?)
}

/// Same result as `solver::diversification_metric_with`.
pub fn diversification_metric(
    tensor: &PayoffTensor,
    t: usize,
    seed: u64,
    sampler: Sampler,
) -> Result<DiversificationMetric> {
    if t == 0 {
        return Err(Error::usage("at least one run is required"));
    }
    let runs = (0..t)
        .into_par_iter()
        .map(|r| ensemble_run(tensor, seed, r, sampler))
        .collect::<poolgame_core::Result<Vec<_>>>()?;
    Ok(DiversificationMetric::from_runs(t, seed, sampler, &runs)?)
}

/// `analytic::boundary_curve` for every `n`, one grid point per task.
pub fn boundary_curves(n_list: &[usize], lambda1: &[f64]) -> Result<Vec<(usize, Vec<BoundaryPoint>)>> {
    n_list
        .par_iter()
        .map(|&n| {
            let points = lambda1
                .par_iter()
                .map(|&l| analytic::boundary_curve(n, &[l]).map(|mut v| v.remove(0)))
                .collect::<poolgame_core::Result<Vec<_>>>()?;
            Ok((n, points))
        })
        .collect()
}

/// `analytic::conjecture_probe` on the interior odds grid for every `n`.
pub fn conjecture_probes(n_list: &[usize], points: usize) -> Result<Vec<ConjectureReport>> {
    n_list
        .par_iter()
        .map(|&n| {
            let c_grid = grid::interior_odds(n, points)?;
            Ok(analytic::conjecture_probe(n, &c_grid)?)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use poolgame_core::dist::DEFAULT_TOL;
    use poolgame_core::game::{self, exact_poisson_tensor};
    use poolgame_core::solver;

    #[test]
    fn mc_matches_sequential() {
        let rates = Rates::new(vec![1.0, 0.8, 0.5]).unwrap();
        let samples = 3 * MC_CHUNK + 1234;
        let par = mc_payoff_tensor(3, &rates, samples, 11).unwrap();
        let seq = game::mc_payoff_tensor(3, &rates, samples, 11).unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn ensemble_matches_sequential() {
        let rates = Rates::new(vec![1.25, 1.0]).unwrap();
        let t = exact_poisson_tensor(3, &rates, DEFAULT_TOL).unwrap();
        for sampler in [Sampler::Descent, Sampler::Dynamics] {
            let par = diversification_metric(&t, 12, 5, sampler).unwrap();
            let seq = solver::diversification_metric_with(&t, 12, 5, sampler).unwrap();
            assert_eq!(par, seq);
        }
    }

    #[test]
    fn boundary_matches_sequential() {
        let grid = grid::linear(0.5, 6.0, 9).unwrap();
        let par = boundary_curves(&[2, 3, 5], &grid).unwrap();
        for (n, points) in par {
            assert_eq!(points, analytic::boundary_curve(n, &grid).unwrap());
        }
    }
}
