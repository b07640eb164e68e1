use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::game::PayoffTensor;
use crate::rng;
use crate::solver::{polish, regret, EquilibriumResult, MAX_ITERATIONS};
use crate::strategy::MixedStrategy;

/// Converged points closer than this in L∞ are reported once.
pub const DEDUP_TOL: f64 = 1e-6;

const POLISH_EVERY: u64 = 25;
const SUPPORT_THRESHOLD: f64 = 1e-4;
const STEP: f64 = 0.5;

/// How one random start ended.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StartDiagnostic {
    pub start: Vec<f64>,
    pub regret: f64,
    pub iterations: u64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SymmetricSearch {
    /// Distinct converged symmetric equilibria, each with regret below the tolerance.
    pub results: Vec<EquilibriumResult>,
    pub diagnostics: Vec<StartDiagnostic>,
}

/// Searches for symmetric equilibria from `starts` flat-Dirichlet starts.
///
/// Each start runs exponential-weights (discrete replicator) steps on the
/// payoffs of pure options against the current strategy, and periodically
/// tries a Newton solve of the indifference conditions on the current
/// support. Only points whose regret is below `tol` are returned.
pub fn find_symmetric_equilibrium(
    tensor: &PayoffTensor,
    starts: usize,
    seed: u64,
    tol: f64,
) -> Result<SymmetricSearch> {
    if starts == 0 {
        return Err(Error::domain("at least one start is required"));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let n = tensor.n();
    let m = tensor.m();
    let eta = STEP / tensor.scale().max(f64::MIN_POSITIVE);
    let mut results: Vec<EquilibriumResult> = Vec::new();
    let mut diagnostics = Vec::with_capacity(starts);
    for k in 0..starts {
        let run_seed = rng::derive_seed(seed, k as u64);
        let mut r = rng::rng(run_seed);
        let start = rng::flat_dirichlet(&mut r, m);
        let mut s = start.clone();
        let mut found = None;
        let mut last_regret = f64::INFINITY;
        let mut it = 0;
        while it < MAX_ITERATIONS {
            let dev = tensor.symmetric_deviation_payoffs_raw(&s);
            last_regret = regret::gain(&s, &dev);
            if last_regret < tol {
                found = Some(s.clone());
                break;
            }
            if it % POLISH_EVERY == POLISH_EVERY - 1 {
                if let Some(p) = polish::polish_symmetric(tensor, &s, SUPPORT_THRESHOLD) {
                    let g = regret::gain(&p, &tensor.symmetric_deviation_payoffs_raw(&p));
                    if g < tol {
                        last_regret = g;
                        found = Some(p);
                        break;
                    }
                }
            }
            let best = dev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            for (p, d) in s.iter_mut().zip(&dev) {
                *p *= libm::exp(eta * (d - best));
            }
            let total: f64 = s.iter().sum();
            for p in s.iter_mut() {
                *p /= total;
            }
            it += 1;
        }
        diagnostics.push(StartDiagnostic {
            start,
            regret: last_regret,
            iterations: it,
            converged: found.is_some(),
        });
        let Some(s) = found else { continue };
        let s = MixedStrategy::new(s)?;
        let certified = regret::symmetric_regret(&s, tensor)?.regret;
        if certified >= tol {
            continue;
        }
        if results
            .iter()
            .any(|e| e.profile[0].linf_distance(&s) <= DEDUP_TOL)
        {
            continue;
        }
        results.push(EquilibriumResult {
            profile: vec![s; n],
            regret: certified,
            symmetric: true,
            iterations: it,
            seed: run_seed,
            converged: true,
        });
    }
    Ok(SymmetricSearch {
        results,
        diagnostics,
    })
}
