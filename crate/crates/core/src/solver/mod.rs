//! Numerical equilibria for general pools: a symmetric search by exponential
//! weights, two asymmetric samplers (smoothed best responses and Liapunov
//! descent), and the ensemble-averaged diversification metric built on them.
//!
//! Every reported equilibrium carries a regret certificate.

mod descent;
mod dynamics;
mod ensemble;
mod polish;
mod regret;
mod symmetric;

use alloc::vec::Vec;

use crate::strategy::MixedStrategy;

pub use descent::regret_descent;
pub use dynamics::{best_response_dynamics, MIN_TEMPERATURE};
pub use ensemble::{
    diversification_metric, diversification_metric_with, ensemble_run, DiversificationMetric, Sampler,
    MAX_FAILURE_RATE,
};
pub use regret::{
    certify_regret, profile_regret, symmetric_regret, SymmetricRegret, MAX_CERTIFY_PROFILES,
    SELF_PAYOFF_TOL,
};
pub use symmetric::{find_symmetric_equilibrium, StartDiagnostic, SymmetricSearch, DEDUP_TOL};

/// Default regret tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Iteration cap for every solver.
pub const MAX_ITERATIONS: u64 = 100_000;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EquilibriumResult {
    pub profile: Vec<MixedStrategy>,
    /// Largest gain from a unilateral pure deviation.
    pub regret: f64,
    pub symmetric: bool,
    pub iterations: u64,
    pub seed: u64,
    /// Whether `regret` reached the requested tolerance.
    pub converged: bool,
}

impl EquilibriumResult {
    /// Probability that a uniformly random agent picks each option.
    pub fn agent_average(&self) -> Vec<f64> {
        let n = self.profile.len() as f64;
        let m = self.profile.first().map_or(0, MixedStrategy::len);
        (0..m)
            .map(|j| self.profile.iter().map(|s| s.get(j)).sum::<f64>() / n)
            .collect()
    }
}

pub(crate) fn is_symmetric(profile: &[MixedStrategy]) -> bool {
    profile
        .windows(2)
        .all(|w| w[0].linf_distance(&w[1]) <= crate::SIMPLEX_TOL)
}
