use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::game::PayoffTensor;
use crate::rng;
use crate::solver::{is_symmetric, polish, regret, EquilibriumResult, MAX_ITERATIONS};
use crate::strategy::MixedStrategy;

/// Floor of the softmax temperature (relative to the payoff scale).
pub const MIN_TEMPERATURE: f64 = 1e-6;

const POLISH_EVERY: u64 = 20;
const SUPPORT_THRESHOLD: f64 = 1e-3;
/// Fraction of the way each agent moves toward its smoothed best response.
const INERTIA: f64 = 0.1;
/// Largest per-iteration move at which support polishing starts.
const STATIONARY: f64 = 1e-3;

/// Samples one (possibly asymmetric) equilibrium.
///
/// Every agent starts from its own flat-Dirichlet strategy. At iteration `k`
/// each agent moves part of the way toward the softmax of its deviation
/// payoffs at temperature `max(1/k, MIN_TEMPERATURE)`, all agents updating
/// simultaneously. Once the largest per-iteration move drops below
/// `STATIONARY`, a Newton solve on the current supports is attempted every
/// few iterations. Payoffs are divided by the tensor's scale first, so
/// scaling the tensor leaves the trajectory unchanged.
///
/// Equilibria that myopic adjustment moves away from (in pool games, often
/// the symmetric mixed one) are rarely returned.
pub fn best_response_dynamics(tensor: &PayoffTensor, seed: u64, tol: f64) -> Result<EquilibriumResult> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let n = tensor.n();
    let m = tensor.m();
    let scale = tensor.scale().max(f64::MIN_POSITIVE);
    let mut r = rng::rng(seed);
    let mut profile: Vec<Vec<f64>> = (0..n).map(|_| rng::flat_dirichlet(&mut r, m)).collect();

    let joint_regret = |p: &[Vec<f64>]| {
        (0..n)
            .map(|i| regret::gain(&p[i], &tensor.deviation_payoffs_raw(p, i)))
            .fold(f64::NEG_INFINITY, f64::max)
    };

    let mut found: Option<(Vec<Vec<f64>>, f64)> = None;
    let mut last_regret = f64::INFINITY;
    let mut last_move = f64::INFINITY;
    let mut k: u64 = 0;
    while k < MAX_ITERATIONS {
        let devs: Vec<Vec<f64>> = (0..n)
            .map(|i| tensor.deviation_payoffs_raw(&profile, i))
            .collect();
        last_regret = (0..n)
            .map(|i| regret::gain(&profile[i], &devs[i]))
            .fold(f64::NEG_INFINITY, f64::max);
        if last_regret < tol {
            found = Some((profile.clone(), last_regret));
            break;
        }
        if last_move < STATIONARY && k % POLISH_EVERY == POLISH_EVERY - 1 {
            if let Some(p) = polish::polish_profile(tensor, &profile, SUPPORT_THRESHOLD) {
                let g = joint_regret(&p);
                if g < tol {
                    found = Some((p, g));
                    break;
                }
            }
        }
        k += 1;
        let temperature = (1.0 / k as f64).max(MIN_TEMPERATURE) * scale;
        last_move = 0.0;
        for (s, dev) in profile.iter_mut().zip(&devs) {
            let best = dev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let weights: Vec<f64> = dev
                .iter()
                .map(|d| libm::exp((d - best) / temperature))
                .collect();
            let total: f64 = weights.iter().sum();
            for (p, w) in s.iter_mut().zip(&weights) {
                let delta = INERTIA * (w / total - *p);
                *p += delta;
                last_move = last_move.max(delta.abs());
            }
        }
    }

    let (final_profile, regret, converged) = match found {
        Some((p, g)) => (p, g, true),
        None => (profile, last_regret, false),
    };
    let profile = final_profile
        .into_iter()
        .map(MixedStrategy::from_weights)
        .collect::<Vec<_>>();
    Ok(EquilibriumResult {
        symmetric: is_symmetric(&profile),
        profile,
        regret,
        iterations: k,
        seed,
        converged,
    })
}
