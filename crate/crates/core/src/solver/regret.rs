use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::game::PayoffTensor;
use crate::strategy::MixedStrategy;

/// Regret certificate of a symmetric profile.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SymmetricRegret {
    /// Best pure deviation payoff minus the payoff of `s` against itself.
    pub regret: f64,
    /// Payoff of each pure option against `n - 1` copies of `s`.
    pub deviation_payoffs: Vec<f64>,
    /// Payoff of `s` against itself; zero for a pool game.
    pub self_payoff: f64,
}

/// Zero-sum symmetric games pay nothing to a symmetric profile; larger
/// values mean the tensor is not a pool game.
pub const SELF_PAYOFF_TOL: f64 = 1e-9;

pub fn symmetric_regret(s: &MixedStrategy, tensor: &PayoffTensor) -> Result<SymmetricRegret> {
    let dev = tensor.symmetric_deviation_payoffs(s)?;
    let self_payoff: f64 = s.probs().iter().zip(&dev).map(|(p, d)| p * d).sum();
    if self_payoff.abs() > SELF_PAYOFF_TOL * tensor.scale().max(1.0) {
        return Err(Error::Inconsistent(alloc::format!(
            "symmetric profile earns {self_payoff} against itself"
        )));
    }
    let best = dev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SymmetricRegret {
        regret: best - self_payoff,
        deviation_payoffs: dev,
        self_payoff,
    })
}

/// Largest gain any agent gets from a pure deviation, via the count-vector
/// recursion.
pub fn profile_regret(profile: &[MixedStrategy], tensor: &PayoffTensor) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for (i, s) in profile.iter().enumerate() {
        let dev = tensor.deviation_payoffs(profile, i)?;
        worst = worst.max(gain(s.probs(), &dev));
    }
    Ok(worst)
}

pub(crate) fn gain(s: &[f64], dev: &[f64]) -> f64 {
    let own: f64 = s.iter().zip(dev).map(|(p, d)| p * d).sum();
    dev.iter().copied().fold(f64::NEG_INFINITY, f64::max) - own
}

/// Largest number of opponent pure profiles [`certify_regret`] will enumerate.
pub const MAX_CERTIFY_PROFILES: u64 = 2_000_000;

/// Same quantity as [`profile_regret`], computed by enumerating every pure
/// choice of the other agents and looking each count vector up directly.
pub fn certify_regret(profile: &[MixedStrategy], tensor: &PayoffTensor) -> Result<f64> {
    let n = tensor.n();
    let m = tensor.m();
    if profile.len() != n || profile.iter().any(|s| s.len() != m) {
        return Err(Error::domain("profile does not match the tensor"));
    }
    let needed = (m as u64).checked_pow((n - 1) as u32).unwrap_or(u64::MAX);
    if needed > MAX_CERTIFY_PROFILES {
        return Err(Error::Capacity {
            what: "opponent profiles to certify",
            needed,
            limit: MAX_CERTIFY_PROFILES,
        });
    }
    let mut worst = f64::NEG_INFINITY;
    for focal in 0..n {
        let others: Vec<usize> = (0..n).filter(|&a| a != focal).collect();
        let mut choice = vec![0usize; n - 1];
        let mut dev = vec![0.0; m];
        'profiles: loop {
            let p: f64 = others
                .iter()
                .zip(&choice)
                .map(|(&a, &j)| profile[a].get(j))
                .product();
            if p > 0.0 {
                let mut counts = vec![0u32; m];
                for &j in &choice {
                    counts[j] += 1;
                }
                for (j, d) in dev.iter_mut().enumerate() {
                    counts[j] += 1;
                    *d += p * tensor.payoff(&counts, j).expect("count vector in tensor");
                    counts[j] -= 1;
                }
            }
            for slot in choice.iter_mut() {
                *slot += 1;
                if *slot < m {
                    continue 'profiles;
                }
                *slot = 0;
            }
            break;
        }
        worst = worst.max(gain(profile[focal].probs(), &dev));
    }
    Ok(worst)
}
