use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::game::PayoffTensor;
use crate::rng;
use crate::solver::{best_response_dynamics, regret_descent, EquilibriumResult, DEFAULT_TOL};

/// Ensembles with a larger share of non-converged runs are rejected.
pub const MAX_FAILURE_RATE: f64 = 0.2;

/// Average probability with which a random agent in a random sampled
/// equilibrium picks each option.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiversificationMetric {
    pub avg_probs: Vec<f64>,
    /// Runs requested.
    pub t: usize,
    pub seed: u64,
    pub sampler: Sampler,
    /// Agent-averaged strategy of each converged run, in run order.
    pub per_run: Vec<Vec<f64>>,
    /// Standard deviation of each option's probability across converged runs.
    pub dispersion: Vec<f64>,
    pub failed_runs: usize,
}

impl DiversificationMetric {
    /// Aggregates runs in the given (run-index) order.
    pub fn from_runs(t: usize, seed: u64, sampler: Sampler, runs: &[EquilibriumResult]) -> Result<Self> {
        let failed_runs = runs.iter().filter(|r| !r.converged).count();
        if runs.is_empty() || failed_runs as f64 > MAX_FAILURE_RATE * runs.len() as f64 {
            let worst = runs
                .iter()
                .filter(|r| !r.converged)
                .map(|r| r.regret)
                .fold(0.0, f64::max);
            return Err(Error::NonConvergence(alloc::format!(
                "{failed_runs} of {} runs did not converge (largest residual regret {worst:e})",
                runs.len()
            )));
        }
        let per_run: Vec<Vec<f64>> = runs
            .iter()
            .filter(|r| r.converged)
            .map(EquilibriumResult::agent_average)
            .collect();
        let m = per_run[0].len();
        let count = per_run.len() as f64;
        let avg_probs: Vec<f64> = (0..m)
            .map(|j| per_run.iter().map(|p| p[j]).sum::<f64>() / count)
            .collect();
        let dispersion = (0..m)
            .map(|j| {
                let var = per_run
                    .iter()
                    .map(|p| (p[j] - avg_probs[j]) * (p[j] - avg_probs[j]))
                    .sum::<f64>()
                    / count;
                libm::sqrt(var)
            })
            .collect();
        Ok(DiversificationMetric {
            avg_probs,
            t,
            seed,
            sampler,
            per_run,
            dispersion,
            failed_runs,
        })
    }

    /// Shannon entropy (nats) of `avg_probs`.
    pub fn entropy(&self) -> f64 {
        -self
            .avg_probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * libm::log(p))
            .sum::<f64>()
    }
}

/// Equilibrium sampler behind an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Sampler {
    /// [`regret_descent`]
    #[default]
    Descent,
    /// [`best_response_dynamics`]
    Dynamics,
}

/// The `run`-th member of an ensemble seeded by `seed`.
pub fn ensemble_run(tensor: &PayoffTensor, seed: u64, run: usize, sampler: Sampler) -> Result<EquilibriumResult> {
    let run_seed = rng::derive_seed(seed, run as u64);
    match sampler {
        Sampler::Descent => regret_descent(tensor, run_seed, DEFAULT_TOL),
        Sampler::Dynamics => best_response_dynamics(tensor, run_seed, DEFAULT_TOL),
    }
}

/// Runs the default sampler `t` times and averages the agent-averaged strategies.
pub fn diversification_metric(tensor: &PayoffTensor, t: usize, seed: u64) -> Result<DiversificationMetric> {
    diversification_metric_with(tensor, t, seed, Sampler::default())
}

pub fn diversification_metric_with(
    tensor: &PayoffTensor,
    t: usize,
    seed: u64,
    sampler: Sampler,
) -> Result<DiversificationMetric> {
    if t == 0 {
        return Err(Error::domain("at least one run is required"));
    }
    let runs = (0..t)
        .map(|r| ensemble_run(tensor, seed, r, sampler))
        .collect::<Result<Vec<_>>>()?;
    DiversificationMetric::from_runs(t, seed, sampler, &runs)
}
