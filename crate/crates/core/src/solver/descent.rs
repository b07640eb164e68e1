use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::game::PayoffTensor;
use crate::rng;
use crate::solver::{is_symmetric, polish, regret, EquilibriumResult, MAX_ITERATIONS};
use crate::strategy::MixedStrategy;

const POLISH_EVERY: u64 = 25;
const SUPPORT_THRESHOLD: f64 = 1e-4;
const ARMIJO: f64 = 1e-4;
/// Relative step below which the descent is considered stuck.
const MIN_STEP: f64 = 1e-18;

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &mut [f64]) {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cum += u;
        let t = (cum - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

struct Eval {
    value: f64,
    regret: f64,
    /// Positive parts of `dev_i[j] - u_i`.
    excess: Vec<Vec<f64>>,
    devs: Vec<Vec<f64>>,
}

fn evaluate(tensor: &PayoffTensor, profile: &[Vec<f64>]) -> Eval {
    let mut value = 0.0;
    let mut worst = f64::NEG_INFINITY;
    let mut excess = Vec::with_capacity(profile.len());
    let mut devs = Vec::with_capacity(profile.len());
    for (i, s) in profile.iter().enumerate() {
        let dev = tensor.deviation_payoffs_raw(profile, i);
        let own: f64 = s.iter().zip(&dev).map(|(p, d)| p * d).sum();
        let r: Vec<f64> = dev.iter().map(|d| (d - own).max(0.0)).collect();
        value += r.iter().map(|x| x * x).sum::<f64>();
        worst = worst.max(regret::gain(s, &dev));
        excess.push(r);
        devs.push(dev);
    }
    Eval {
        value,
        regret: worst,
        excess,
        devs,
    }
}

fn gradient(tensor: &PayoffTensor, profile: &[Vec<f64>], eval: &Eval) -> Vec<Vec<f64>> {
    let n = profile.len();
    let m = tensor.m();
    let mut grad = vec![vec![0.0; m]; n];
    for i in 0..n {
        let total: f64 = eval.excess[i].iter().sum();
        for l in 0..m {
            grad[i][l] -= 2.0 * total * eval.devs[i][l];
        }
    }
    for i in 0..n {
        let mut fixed = profile.to_vec();
        for l in 0..m {
            fixed[i] = vec![0.0; m];
            fixed[i][l] = 1.0;
            for k in (0..n).filter(|&k| k != i) {
                let r = &eval.excess[k];
                if r.iter().all(|&x| x == 0.0) {
                    continue;
                }
                let dev = tensor.deviation_payoffs_raw(&fixed, k);
                let own: f64 = profile[k].iter().zip(&dev).map(|(p, d)| p * d).sum();
                grad[i][l] += 2.0 * r.iter().zip(&dev).map(|(x, d)| x * (d - own)).sum::<f64>();
            }
        }
    }
    grad
}

/// Samples one equilibrium by minimizing the Liapunov function
/// `V = Σ_i Σ_j max(0, u_i(j) - u_i)²` from a random start.
///
/// Every agent starts from its own flat-Dirichlet strategy; projected
/// gradient steps with Armijo backtracking run on the product of simplices,
/// and every few iterations a Newton solve on the current supports is
/// attempted. Every equilibrium is a zero of `V`, so unlike best-response
/// dynamics the descent also settles on equilibria that are unstable under
/// myopic adjustment.
pub fn regret_descent(tensor: &PayoffTensor, seed: u64, tol: f64) -> Result<EquilibriumResult> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let n = tensor.n();
    let m = tensor.m();
    let scale = tensor.scale().max(f64::MIN_POSITIVE);
    let mut r = rng::rng(seed);
    let mut profile: Vec<Vec<f64>> = (0..n).map(|_| rng::flat_dirichlet(&mut r, m)).collect();

    let mut eval = evaluate(tensor, &profile);
    let mut step = 1.0 / (scale * scale);
    let mut found = None;
    let mut k: u64 = 0;
    while k < MAX_ITERATIONS {
        if eval.regret < tol {
            found = Some((profile.clone(), eval.regret));
            break;
        }
        if k % POLISH_EVERY == POLISH_EVERY - 1 {
            if let Some(p) = polish::polish_profile(tensor, &profile, SUPPORT_THRESHOLD) {
                let g = evaluate(tensor, &p).regret;
                if g < tol {
                    found = Some((p, g));
                    break;
                }
            }
        }
        k += 1;
        let grad = gradient(tensor, &profile, &eval);
        step *= 2.0;
        loop {
            let mut next = profile.clone();
            let mut decrease = 0.0;
            for ((s, g), old) in next.iter_mut().zip(&grad).zip(&profile) {
                for (x, d) in s.iter_mut().zip(g) {
                    *x -= step * d;
                }
                project_simplex(s);
                decrease += g.iter().zip(s.iter()).zip(old).map(|((d, x), o)| d * (o - x)).sum::<f64>();
            }
            let trial = evaluate(tensor, &next);
            if trial.value <= eval.value - ARMIJO * decrease {
                profile = next;
                eval = trial;
                break;
            }
            step *= 0.5;
            if step * scale * scale < MIN_STEP {
                break;
            }
        }
        if step * scale * scale < MIN_STEP {
            break;
        }
    }

    let (final_profile, regret, converged) = match found {
        Some((p, g)) => (p, g, true),
        None => (profile, eval.regret, false),
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
