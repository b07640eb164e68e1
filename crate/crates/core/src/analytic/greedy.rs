use alloc::vec::Vec;

use crate::dist::{self, ComparisonProbs, Rates, DEFAULT_TOL};
use crate::error::{Error, Result};

/// Gaps this close to zero are reported as indifference.
pub const INDIFFERENCE_TOL: f64 = 1e-12;

/// Best pure reply of the last agent when every other agent backs the favorite.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "SCREAMING_SNAKE_CASE"))]
pub enum Verdict {
    UniquelyFavorite,
    /// Deviating to this (0-based) process is strictly better.
    UniquelyDeviate(usize),
    Indifferent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GreedyResponse {
    pub verdict: Verdict,
    /// `P(Y_dev > Y_fav) - P(Y_dev < Y_fav) / (n - 1)`.
    pub threshold_gap: f64,
    pub deviant: usize,
    /// The deviant compared against the favorite.
    pub comparison: ComparisonProbs,
}

/// Reply of agent `n` when agents `1..n-1` all pick `favorite`.
///
/// Among the other processes only a highest-rate one (lowest index on ties)
/// is worth considering, since the pool is shared only when joining the
/// favorite. Deviating pays `(n-1) * threshold_gap` in expectation.
pub fn greedy_best_response(n: usize, rates: &Rates, favorite: usize) -> Result<GreedyResponse> {
    if n < 2 {
        return Err(Error::domain("at least two agents are required"));
    }
    if favorite >= rates.len() {
        return Err(Error::domain("favorite index out of range"));
    }
    let fav_rate = rates.get(favorite);
    if rates.as_slice().iter().any(|&l| l > fav_rate) {
        return Err(Error::domain(
            "the favorite must have the highest rate among all processes",
        ));
    }
    let deviant = (0..rates.len())
        .filter(|&j| j != favorite)
        .fold(None, |best: Option<usize>, j| match best {
            Some(b) if rates.get(b) >= rates.get(j) => Some(b),
            _ => Some(j),
        })
        .expect("at least two processes");
    let comparison = dist::compare(rates.get(deviant), fav_rate, DEFAULT_TOL)?;
    let threshold_gap = comparison.p_gt - comparison.p_lt / (n - 1) as f64;
    let verdict = if threshold_gap.abs() <= INDIFFERENCE_TOL {
        Verdict::Indifferent
    } else if threshold_gap > 0.0 {
        Verdict::UniquelyDeviate(deviant)
    } else {
        Verdict::UniquelyFavorite
    };
    Ok(GreedyResponse {
        verdict,
        threshold_gap,
        deviant,
        comparison,
    })
}

/// Point on the favorite/underdog boundary for a given favorite rate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundaryPoint {
    pub lambda1: f64,
    /// Underdog rate at which deviating becomes worthwhile; `None` if the
    /// gap does not change sign on `(0, lambda1]`.
    pub lambda2: Option<f64>,
}

/// Bisection width in `λ2`.
pub const BOUNDARY_TOL: f64 = 1e-8;

fn deviation_gap(n: usize, lambda1: f64, lambda2: f64) -> Result<f64> {
    let c = dist::compare(lambda2, lambda1, DEFAULT_TOL)?;
    Ok(c.p_gt - c.p_lt / (n - 1) as f64)
}

/// Solves `P(Y2 > Y1) = P(Y2 < Y1) / (n - 1)` for `λ2 ∈ (0, λ1]` at each `λ1`.
///
/// For two agents the gap is negative for every `λ2 < λ1` and zero on the
/// diagonal, so the boundary is the diagonal itself.
pub fn boundary_curve(n: usize, lambda1_grid: &[f64]) -> Result<Vec<BoundaryPoint>> {
    if n < 2 {
        return Err(Error::domain("at least two agents are required"));
    }
    lambda1_grid
        .iter()
        .map(|&lambda1| {
            if !(lambda1.is_finite() && lambda1 > 0.0) {
                return Err(Error::domain("grid rates must be positive and finite"));
            }
            if n == 2 {
                return Ok(BoundaryPoint {
                    lambda1,
                    lambda2: Some(lambda1),
                });
            }
            let (mut lo, mut hi) = (lambda1 * 1e-9, lambda1);
            let bracket = deviation_gap(n, lambda1, lo)? < 0.0 && deviation_gap(n, lambda1, hi)? > 0.0;
            if !bracket {
                return Ok(BoundaryPoint {
                    lambda1,
                    lambda2: None,
                });
            }
            while hi - lo > BOUNDARY_TOL {
                let mid = 0.5 * (lo + hi);
                if deviation_gap(n, lambda1, mid)? > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Ok(BoundaryPoint {
                lambda1,
                lambda2: Some(0.5 * (lo + hi)),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn two_agents_always_favorite() {
        let rates = Rates::new(vec![2.0, 1.0]).unwrap();
        let r = greedy_best_response(2, &rates, 0).unwrap();
        assert_eq!(r.verdict, Verdict::UniquelyFavorite);
    }

    #[test]
    fn equal_rates_deviate_from_three_agents() {
        let rates = Rates::new(vec![1.7, 1.7]).unwrap();
        for n in 3..8 {
            let r = greedy_best_response(n, &rates, 0).unwrap();
            assert!(r.threshold_gap > 0.0);
            assert_eq!(r.verdict, Verdict::UniquelyDeviate(1));
        }
        assert_eq!(
            greedy_best_response(2, &rates, 0).unwrap().verdict,
            Verdict::Indifferent
        );
    }

    #[test]
    fn favorite_must_be_max() {
        let rates = Rates::new(vec![1.0, 2.0]).unwrap();
        assert!(greedy_best_response(3, &rates, 0).is_err());
        assert!(greedy_best_response(3, &rates, 5).is_err());
    }

    #[test]
    fn deviant_ties_break_low() {
        let rates = Rates::new(vec![1.0, 0.5, 0.9, 0.9]).unwrap();
        assert_eq!(greedy_best_response(4, &rates, 0).unwrap().deviant, 2);
    }

    #[test]
    fn diagonal_for_two_agents() {
        let pts = boundary_curve(2, &[0.5, 3.0]).unwrap();
        assert!(pts.iter().all(|p| p.lambda2 == Some(p.lambda1)));
    }

    #[test]
    fn boundary_zeroes_the_gap() {
        let p = boundary_curve(3, &[4.0]).unwrap()[0];
        let l2 = p.lambda2.unwrap();
        assert!(l2 < 4.0);
        assert!(deviation_gap(3, 4.0, l2 - 1e-6).unwrap() < 0.0);
        assert!(deviation_gap(3, 4.0, l2 + 1e-6).unwrap() > 0.0);
    }
}
