//! Parameter grids for curves and probes.

use crate::{Error, Result};

/// `points` evenly spaced values from `lo` to `hi` inclusive.
pub fn linear(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::usage(format!("bad grid bounds [{lo}, {hi}]")));
    }
    match points {
        0 => Err(Error::usage("a grid needs at least one point")),
        1 => Ok(vec![lo]),
        _ => {
            let step = (hi - lo) / (points - 1) as f64;
            Ok((0..points)
                .map(|i| if i + 1 == points { hi } else { lo + step * i as f64 })
                .collect())
        }
    }
}

/// `points` log-evenly spaced values strictly inside `(lo, hi)`, endpoints excluded.
pub fn interior_log(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi.is_finite() && lo < hi) {
        return Err(Error::usage(format!("bad grid bounds ({lo}, {hi})")));
    }
    if points == 0 {
        return Err(Error::usage("a grid needs at least one point"));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((1..=points)
        .map(|i| (a + (b - a) * i as f64 / (points + 1) as f64).exp())
        .collect())
}

/// Odds-ratio grid for the symmetric-equilibrium probe: the open interval
/// `(1/(n-1), n-1)` where the equilibrium is interior.
pub fn interior_odds(n: usize, points: usize) -> Result<Vec<f64>> {
    if n < 3 {
        return Err(Error::usage("the interior range needs n >= 3"));
    }
    let d = (n - 1) as f64;
    let grid = interior_log(1.0 / d, d, points)?;
    Ok(grid
        .into_iter()
        .filter(|&c| c * d > 1.0 && c < d)
        .collect())
}

/// Parses `3,4,5`, `3-5` or a mix such as `2,4-6`.
pub fn parse_list(text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let bad = || Error::usage(format!("bad list item `{item}`"));
        match item.split_once('-') {
            Some((a, b)) => {
                let a: usize = a.trim().parse().map_err(|_| bad())?;
                let b: usize = b.trim().parse().map_err(|_| bad())?;
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(item.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err(Error::usage(format!("empty list `{text}`")));
    }
    Ok(out)
}

/// Parses a comma-separated list of reals.
pub fn parse_reals(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::usage(format!("`{s}` is not a number")))
        })
        .collect()
}
