use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::analytic::roots::{self, RootInterval};
use crate::error::{Error, Result};
use crate::game::{exact_payoff_tensor, OutcomeDistribution};
use crate::strategy::MixedStrategy;

/// Interior roots are bisected at least this far; in practice the bracket
/// is shrunk to adjacent floats.
pub const ROOT_TOL: f64 = 1e-12;

/// Payoff advantage of option 1 over option 2 for one agent whose `n - 1`
/// opponents each pick option 1 with probability `s`, divided by
/// `P(Y1 < Y2)`, as a polynomial in `s`.
///
/// In Bernstein form the coefficient for `k` opponents on option 1 is
/// `c(n-1) - 1` at `k = 0`, `c - (n-1)` at `k = n-1`, and
/// `c·n/(k+1) - n/(n-k)` in between.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SymmetricEqPolynomial {
    pub n: usize,
    pub c: f64,
    /// Power-basis coefficients, constant term first.
    pub coeffs: Vec<f64>,
    /// Coefficients in the degree `n - 1` Bernstein basis on `[0, 1]`.
    pub bernstein: Vec<f64>,
}

impl SymmetricEqPolynomial {
    pub fn eval(&self, s: f64) -> f64 {
        roots::horner(&self.coeffs, s)
    }

    /// Evaluation through the Bernstein coefficients; better conditioned on `[0, 1]`.
    pub fn eval_bernstein(&self, s: f64) -> f64 {
        roots::bernstein_eval(&self.bernstein, s)
    }
}

fn check_n_c(n: usize, c: f64) -> Result<()> {
    if n < 3 {
        return Err(Error::domain("the symmetric polynomial needs n >= 3"));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::domain("the odds ratio c must be positive and finite"));
    }
    Ok(())
}

pub fn symmetric_eq_polynomial(n: usize, c: f64) -> Result<SymmetricEqPolynomial> {
    check_n_c(n, c)?;
    let d = n - 1;
    let nf = n as f64;
    let bernstein: Vec<f64> = (0..=d)
        .map(|k| {
            if k == 0 {
                c * d as f64 - 1.0
            } else if k == d {
                c - d as f64
            } else {
                c * nf / (k + 1) as f64 - nf / (n - k) as f64
            }
        })
        .collect();
    // s^k (1-s)^(d-k) = Σ_i C(d-k, i) (-1)^i s^(k+i)
    let coeffs = (0..=d)
        .map(|p| {
            let terms = (0..=p).map(|k| {
                let sign = if (p - k) % 2 == 0 { 1.0 } else { -1.0 };
                sign * roots::binomial(d, k) * roots::binomial(d - k, p - k) * bernstein[k]
            });
            let (sum, mag) = roots::compensated_sum(terms);
            // Below the rounding bound the coefficient cannot be told from zero.
            if sum.abs() <= 4.0 * f64::EPSILON * mag {
                0.0
            } else {
                sum
            }
        })
        .collect();
    Ok(SymmetricEqPolynomial {
        n,
        c,
        coeffs,
        bernstein,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "SCREAMING_SNAKE_CASE"))]
pub enum EquilibriumKind {
    /// Everyone backs the more likely winner (`s1 = 1` when `c > 1`, `s1 = 0` when `c < 1`).
    PureFavorite,
    Interior,
}

/// One symmetric equilibrium of a two-option pool.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SymmetricEquilibrium {
    /// Probability of picking option 1.
    pub s1: f64,
    pub kind: EquilibriumKind,
    /// Polynomial value at `s1`.
    pub residual: f64,
    /// Largest gain from a pure deviation, recomputed from an exact payoff
    /// tensor of a two-outcome pool with the same `c`.
    pub payoff_regret: f64,
}

/// Pure deviations gaining more than this flag a returned point as not an equilibrium.
pub const VERIFY_TOL: f64 = 1e-8;

impl SymmetricEquilibrium {
    pub fn is_verified(&self) -> bool {
        self.payoff_regret <= VERIFY_TOL
    }
}

/// Regret of the symmetric profile `(s1, 1 - s1)` in the two-outcome pool
/// where option 1 ranks first with odds `c : 1`.
///
/// Ties only shift both options by the same amount, so a pool without ties
/// has the same equilibria as any Poisson pool with this odds ratio.
pub fn two_process_regret(n: usize, c: f64, s1: f64) -> Result<f64> {
    let outcome = OutcomeDistribution::two_way(c / (1.0 + c))?;
    let tensor = exact_payoff_tensor(n, &outcome)?;
    let s = MixedStrategy::new(vec![s1, 1.0 - s1])?;
    let dev = tensor.symmetric_deviation_payoffs(&s)?;
    let own = s1 * dev[0] + (1.0 - s1) * dev[1];
    Ok(dev[0].max(dev[1]) - own)
}

/// Odd-multiplicity roots of the polynomial in `(0, 1)`, ascending.
pub fn interior_roots(poly: &SymmetricEqPolynomial) -> Vec<f64> {
    let f = |s: f64| poly.eval_bernstein(s);
    let mut out = Vec::new();
    for interval in roots::isolate_unit_roots(&poly.bernstein) {
        match interval {
            RootInterval::Simple { lo, hi } => out.push(roots::bisect(f, lo, hi, 0.0)),
            RootInterval::Cluster { lo, hi } => {
                let (a, b) = (f(lo), f(hi));
                if a != 0.0 && b != 0.0 && (a > 0.0) != (b > 0.0) {
                    out.push(0.5 * (lo + hi));
                }
            }
            RootInterval::Exact { at } => {
                let step = 1e-7;
                let (a, b) = (f(at - step), f(at + step));
                if (a > 0.0) != (b > 0.0) {
                    out.push(at);
                }
            }
        }
    }
    out
}

/// Symmetric equilibria of the two-process pool with `n >= 3` agents and odds ratio `c`.
pub fn symmetric_equilibria_two_process(n: usize, c: f64) -> Result<Vec<SymmetricEquilibrium>> {
    let poly = symmetric_eq_polynomial(n, c)?;
    let d = (n - 1) as f64;
    let make = |s1: f64, kind| -> Result<SymmetricEquilibrium> {
        Ok(SymmetricEquilibrium {
            s1,
            kind,
            residual: poly.eval(s1),
            payoff_regret: two_process_regret(n, c, s1)?,
        })
    };
    if c >= d {
        return Ok(vec![make(1.0, EquilibriumKind::PureFavorite)?]);
    }
    if c * d <= 1.0 {
        return Ok(vec![make(0.0, EquilibriumKind::PureFavorite)?]);
    }
    let roots = interior_roots(&poly);
    if roots.is_empty() {
        return Err(Error::Inconsistent(alloc::format!(
            "no odd-multiplicity root in (0,1) for n = {n}, c = {c}"
        )));
    }
    roots
        .into_iter()
        .map(|s| make(s, EquilibriumKind::Interior))
        .collect()
}

/// One grid point of [`conjecture_probe`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProbeRow {
    pub c: f64,
    /// Interior equilibria found by isolation, ascending.
    pub roots: Vec<f64>,
    /// Distinct real roots in `(0, 1)` counted by Sturm's theorem.
    pub sturm_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConjectureReport {
    pub n: usize,
    pub rows: Vec<ProbeRow>,
    /// Exactly one interior equilibrium (and one real root) at every grid point.
    pub unique: bool,
    /// The equilibrium probability increases strictly along the grid.
    pub strictly_increasing: bool,
    pub findings: Vec<String>,
}

/// Evidence for uniqueness and monotonicity of the interior symmetric
/// equilibrium as `c` moves through `(1/(n-1), n-1)`.
///
/// Counterexamples end up in `findings`; only a grid point with no
/// equilibrium at all is an error.
pub fn conjecture_probe(n: usize, c_grid: &[f64]) -> Result<ConjectureReport> {
    if n < 3 {
        return Err(Error::domain("the probe needs n >= 3"));
    }
    let d = (n - 1) as f64;
    if c_grid.is_empty() {
        return Err(Error::domain("empty grid"));
    }
    for w in c_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::domain("the c grid must be strictly increasing"));
        }
    }
    if c_grid.iter().any(|&c| !(c * d > 1.0 && c < d)) {
        return Err(Error::domain(
            "grid points must lie strictly inside (1/(n-1), n-1)",
        ));
    }
    let mut rows = Vec::with_capacity(c_grid.len());
    let mut findings = Vec::new();
    for &c in c_grid {
        let poly = symmetric_eq_polynomial(n, c)?;
        let roots = interior_roots(&poly);
        if roots.is_empty() {
            return Err(Error::NonConvergence(alloc::format!(
                "no interior equilibrium located for n = {n}, c = {c}"
            )));
        }
        let sturm_count = roots::sturm_count_unit(&poly.coeffs);
        if roots.len() != 1 || sturm_count != 1 {
            findings.push(alloc::format!(
                "c = {c}: {} odd-multiplicity roots, {sturm_count} distinct real roots",
                roots.len()
            ));
        }
        rows.push(ProbeRow {
            c,
            roots,
            sturm_count,
        });
    }
    let unique = rows.iter().all(|r| r.roots.len() == 1 && r.sturm_count == 1);
    let mut strictly_increasing = true;
    for w in rows.windows(2) {
        if w[1].roots[0] <= w[0].roots[0] {
            strictly_increasing = false;
            findings.push(alloc::format!(
                "s1 does not increase between c = {} and c = {}",
                w[0].c,
                w[1].c
            ));
        }
    }
    Ok(ConjectureReport {
        n,
        rows,
        unique,
        strictly_increasing,
        findings,
    })
}
