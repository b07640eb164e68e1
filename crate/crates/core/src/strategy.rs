use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Simplex violations up to this size are accepted and cleaned up.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Probabilities of picking each of the `m` options.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "Vec<f64>", into = "Vec<f64>"))]
pub struct MixedStrategy(Vec<f64>);

impl MixedStrategy {
    /// Validates `probs` against the simplex. Entries in `[-1e-9, 0)` are
    /// clamped to zero; the vector is not renormalized.
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::domain("a strategy needs at least one option"));
        }
        let mut total = 0.0;
        for p in probs.iter_mut() {
            if !p.is_finite() || *p < -SIMPLEX_TOL {
                return Err(Error::domain(alloc::format!(
                    "strategy entry {p} is not a probability"
                )));
            }
            *p = p.max(0.0);
            total += *p;
        }
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::domain(alloc::format!(
                "strategy sums to {total}, expected 1"
            )));
        }
        Ok(MixedStrategy(probs))
    }

    /// Normalizes non-negative weights onto the simplex.
    pub(crate) fn from_weights(mut w: Vec<f64>) -> Self {
        let total: f64 = w.iter().sum();
        for x in w.iter_mut() {
            *x /= total;
        }
        MixedStrategy(w)
    }

    pub fn pure(m: usize, j: usize) -> Self {
        let mut p = vec![0.0; m];
        p[j] = 1.0;
        MixedStrategy(p)
    }

    pub fn uniform(m: usize) -> Self {
        MixedStrategy(vec![1.0 / m as f64; m])
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, j: usize) -> f64 {
        self.0[j]
    }

    pub fn linf_distance(&self, other: &MixedStrategy) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<f64>> for MixedStrategy {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        MixedStrategy::new(v)
    }
}

impl From<MixedStrategy> for Vec<f64> {
    fn from(s: MixedStrategy) -> Self {
        s.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(MixedStrategy::new(vec![0.5, 0.5]).is_ok());
        assert!(MixedStrategy::new(vec![0.5, 0.4]).is_err());
        assert!(MixedStrategy::new(vec![1.1, -0.1]).is_err());
        assert!(MixedStrategy::new(vec![]).is_err());
        let s = MixedStrategy::new(vec![1.0 + 5e-10, -5e-10]).unwrap();
        assert_eq!(s.get(1), 0.0);
    }
}
