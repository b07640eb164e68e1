//! Newton refinement of equilibria on a guessed support.
//!
//! On the support every option must earn the same payoff, and each strategy
//! sums to one. That square system is solved by Newton's method with a
//! central-difference Jacobian; the caller re-checks the full regret, so a
//! wrong support guess is rejected rather than trusted.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::game::PayoffTensor;

const MAX_NEWTON: usize = 40;
const FD_STEP: f64 = 1e-7;

/// Solves `f(x) = 0` from `x0`. Returns `None` if the iteration stalls or the
/// Jacobian is singular.
fn newton(f: impl Fn(&[f64]) -> Vec<f64>, x0: Vec<f64>, scale: f64) -> Option<Vec<f64>> {
    let dim = x0.len();
    let mut x = x0;
    let mut fx = f(&x);
    let target = 1e-13 * scale.max(1.0);
    for _ in 0..MAX_NEWTON {
        let norm = fx.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        if norm <= target {
            return Some(x);
        }
        let mut jac = DMatrix::<f64>::zeros(dim, dim);
        for col in 0..dim {
            let mut plus = x.clone();
            let mut minus = x.clone();
            plus[col] += FD_STEP;
            minus[col] -= FD_STEP;
            let (fp, fm) = (f(&plus), f(&minus));
            for row in 0..dim {
                jac[(row, col)] = (fp[row] - fm[row]) / (2.0 * FD_STEP);
            }
        }
        let rhs = DVector::from_iterator(dim, fx.iter().map(|v| -v));
        let step = jac.lu().solve(&rhs)?;
        if step.iter().any(|v| !v.is_finite()) {
            return None;
        }
        for (xi, si) in x.iter_mut().zip(step.iter()) {
            *xi += si;
        }
        let next = f(&x);
        let next_norm = next.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        if next_norm > 10.0 * norm && norm > target {
            return None;
        }
        fx = next;
    }
    let norm = fx.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    (norm <= 1e-10 * scale.max(1.0)).then_some(x)
}

/// Clamps tiny negatives produced by Newton; rejects real ones.
fn project(mut s: Vec<f64>) -> Option<Vec<f64>> {
    for p in s.iter_mut() {
        if *p < -1e-10 || *p > 1.0 + 1e-10 {
            return None;
        }
        *p = p.clamp(0.0, 1.0);
    }
    let total: f64 = s.iter().sum();
    for p in s.iter_mut() {
        *p /= total;
    }
    Some(s)
}

/// Refines a symmetric strategy on the support `{j : s_j > threshold}`.
pub(crate) fn polish_symmetric(tensor: &PayoffTensor, s: &[f64], threshold: f64) -> Option<Vec<f64>> {
    let m = s.len();
    let support: Vec<usize> = (0..m).filter(|&j| s[j] > threshold).collect();
    let q = support.len();
    if q == 0 {
        return None;
    }
    if q == 1 {
        return Some(crate::strategy::MixedStrategy::pure(m, support[0]).probs().to_vec());
    }
    let expand = |x: &[f64]| {
        let mut full = vec![0.0; m];
        for (k, &j) in support.iter().enumerate() {
            full[j] = x[k];
        }
        full
    };
    let residual = |x: &[f64]| {
        let dev = tensor.symmetric_deviation_payoffs_raw(&expand(x));
        let v = x[q];
        let mut r: Vec<f64> = support.iter().map(|&j| dev[j] - v).collect();
        r.push(x[..q].iter().sum::<f64>() - 1.0);
        r
    };
    let total: f64 = support.iter().map(|&j| s[j]).sum();
    let mut x0: Vec<f64> = support.iter().map(|&j| s[j] / total).collect();
    let dev0 = tensor.symmetric_deviation_payoffs_raw(&expand(&x0));
    x0.push(support.iter().map(|&j| dev0[j]).sum::<f64>() / q as f64);
    let x = newton(residual, x0, tensor.scale())?;
    project(expand(&x[..q]))
}

/// Refines a full profile on the per-agent supports `{j : s_ij > threshold}`.
pub(crate) fn polish_profile(
    tensor: &PayoffTensor,
    profile: &[Vec<f64>],
    threshold: f64,
) -> Option<Vec<Vec<f64>>> {
    let m = tensor.m();
    let supports: Vec<Vec<usize>> = profile
        .iter()
        .map(|s| (0..m).filter(|&j| s[j] > threshold).collect())
        .collect();
    if supports.iter().any(|s| s.is_empty()) {
        return None;
    }
    // Layout: for each agent, its support probabilities then its value.
    let offsets: Vec<usize> = supports
        .iter()
        .scan(0, |acc, s| {
            let o = *acc;
            *acc += s.len() + 1;
            Some(o)
        })
        .collect();
    let dim: usize = supports.iter().map(|s| s.len() + 1).sum();
    let expand = |x: &[f64]| -> Vec<Vec<f64>> {
        supports
            .iter()
            .zip(&offsets)
            .map(|(sup, &o)| {
                let mut full = vec![0.0; m];
                for (k, &j) in sup.iter().enumerate() {
                    full[j] = x[o + k];
                }
                full
            })
            .collect()
    };
    let residual = |x: &[f64]| {
        let full = expand(x);
        let mut r = Vec::with_capacity(dim);
        for (i, (sup, &o)) in supports.iter().zip(&offsets).enumerate() {
            if sup.len() == 1 {
                // Pure agents: pin the probability and the value, nothing to solve.
                r.push(x[o] - 1.0);
                r.push(x[o + 1] - tensor.deviation_payoffs_raw(&full, i)[sup[0]]);
                continue;
            }
            let dev = tensor.deviation_payoffs_raw(&full, i);
            let v = x[o + sup.len()];
            r.extend(sup.iter().map(|&j| dev[j] - v));
            r.push(x[o..o + sup.len()].iter().sum::<f64>() - 1.0);
        }
        r
    };
    let mut x0 = vec![0.0; dim];
    for (i, (sup, &o)) in supports.iter().zip(&offsets).enumerate() {
        let total: f64 = sup.iter().map(|&j| profile[i][j]).sum();
        for (k, &j) in sup.iter().enumerate() {
            x0[o + k] = profile[i][j] / total;
        }
    }
    let start = expand(&x0);
    for (i, (sup, &o)) in supports.iter().zip(&offsets).enumerate() {
        let dev = tensor.deviation_payoffs_raw(&start, i);
        x0[o + sup.len()] = sup.iter().map(|&j| dev[j]).sum::<f64>() / sup.len() as f64;
    }
    let x = newton(residual, x0, tensor.scale())?;
    expand(&x).into_iter().map(project).collect()
}
