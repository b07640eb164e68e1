//! Closed-form results: greedy replies, the favorite/underdog boundary, two-agent
//! best responses, and symmetric equilibria of two-option pools.

mod greedy;
pub mod roots;
mod symmetric;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::game::PayoffTensor;
use crate::set::ProcessSet;

pub use greedy::{
    boundary_curve, greedy_best_response, BoundaryPoint, GreedyResponse, Verdict, BOUNDARY_TOL,
    INDIFFERENCE_TOL,
};
pub use symmetric::{
    conjecture_probe, interior_roots, symmetric_eq_polynomial, symmetric_equilibria_two_process,
    two_process_regret, ConjectureReport, EquilibriumKind, ProbeRow, SymmetricEqPolynomial,
    SymmetricEquilibrium, ROOT_TOL, VERIFY_TOL,
};

/// Payoffs within this distance of the best count as ties.
pub const BEST_RESPONSE_TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TwoAgentBestResponse {
    /// Best replies to each pure choice of the opponent.
    pub per_opponent: Vec<ProcessSet>,
    /// Options that are a best reply to every opponent choice, if any.
    pub dominant: Option<ProcessSet>,
}

/// Pure best replies in a two-agent pool, for every opponent choice.
pub fn two_agent_best_response(tensor: &PayoffTensor) -> Result<TwoAgentBestResponse> {
    if tensor.n() != 2 {
        return Err(Error::domain("two-agent best responses need n = 2"));
    }
    let m = tensor.m();
    let mut per_opponent = Vec::with_capacity(m);
    for k in 0..m {
        let values: Vec<f64> = (0..m)
            .map(|j| {
                let mut counts = alloc::vec![0u32; m];
                counts[j] += 1;
                counts[k] += 1;
                tensor.payoff(&counts, j).expect("option j was chosen")
            })
            .collect();
        let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        per_opponent.push(
            (0..m)
                .filter(|&j| values[j] >= best - BEST_RESPONSE_TIE_TOL)
                .collect(),
        );
    }
    let common = per_opponent
        .iter()
        .fold(ProcessSet::full(m), |acc, s| acc.intersection(*s));
    Ok(TwoAgentBestResponse {
        per_opponent,
        dominant: (!common.is_empty()).then_some(common),
    })
}
