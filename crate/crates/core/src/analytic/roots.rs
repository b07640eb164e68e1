//! Real roots of polynomials on the unit interval.
//!
//! Isolation works on Bernstein coefficients: the number of sign changes in
//! the coefficient sequence bounds the number of roots in `(0, 1)` with the
//! same parity (Descartes' rule in Bernstein form), and de Casteljau
//! subdivision at the midpoint yields the coefficients of both halves. A
//! single sign change certifies exactly one simple root.

use alloc::vec;
use alloc::vec::Vec;

/// Neumaier-compensated sum. Returns the sum and the sum of magnitudes, the
/// latter bounding the rounding error when scaled by a few ulps.
pub(crate) fn compensated_sum(terms: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let (mut sum, mut comp, mut mag) = (0.0f64, 0.0f64, 0.0f64);
    for x in terms {
        mag += x.abs();
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    (sum + comp, mag)
}

/// `C(n, k)` as a float; exact for the sizes used here.
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    libm::round(acc)
}

/// Value of the Bernstein-form polynomial at `t` by de Casteljau.
pub fn bernstein_eval(coeffs: &[f64], t: f64) -> f64 {
    let mut b = coeffs.to_vec();
    let d = b.len();
    for r in 1..d {
        for i in 0..d - r {
            b[i] = (1.0 - t) * b[i] + t * b[i + 1];
        }
    }
    b[0]
}

/// Value of the power-basis polynomial (ascending coefficients) at `x`.
pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

/// Splits Bernstein coefficients on `[0,1]` into those of `[0,1/2]` and `[1/2,1]`.
fn subdivide(coeffs: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let d = coeffs.len();
    let mut work = coeffs.to_vec();
    let mut left = Vec::with_capacity(d);
    let mut right = vec![0.0; d];
    left.push(work[0]);
    right[d - 1] = work[d - 1];
    for r in 1..d {
        for i in 0..d - r {
            work[i] = 0.5 * (work[i] + work[i + 1]);
        }
        left.push(work[0]);
        right[d - 1 - r] = work[d - 1 - r];
    }
    (left, right)
}

fn sign_variations(coeffs: &[f64]) -> usize {
    let mut last = 0.0;
    let mut count = 0;
    for &c in coeffs {
        if c == 0.0 {
            continue;
        }
        if last != 0.0 && (c > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = c;
    }
    count
}

/// An interval of `(0, 1)` returned by [`isolate_unit_roots`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootInterval {
    /// Holds exactly one root, which is simple.
    Simple { lo: f64, hi: f64 },
    /// Subdivision bottomed out with more than one sign change left: a
    /// multiple root or a tight cluster.
    Cluster { lo: f64, hi: f64 },
    /// The polynomial vanishes exactly at a subdivision point.
    Exact { at: f64 },
}

const MIN_WIDTH: f64 = 1e-13;

/// Isolates the real roots in the open interval `(0, 1)` of the polynomial
/// with the given Bernstein coefficients.
pub fn isolate_unit_roots(bernstein: &[f64]) -> Vec<RootInterval> {
    fn recurse(b: &[f64], lo: f64, hi: f64, out: &mut Vec<RootInterval>) {
        match sign_variations(b) {
            0 => {}
            1 => out.push(RootInterval::Simple { lo, hi }),
            _ if hi - lo < MIN_WIDTH => out.push(RootInterval::Cluster { lo, hi }),
            _ => {
                let mid = 0.5 * (lo + hi);
                let (left, right) = subdivide(b);
                recurse(&left, lo, mid, out);
                if left[left.len() - 1] == 0.0 {
                    out.push(RootInterval::Exact { at: mid });
                }
                recurse(&right, mid, hi, out);
            }
        }
    }
    let mut out = Vec::new();
    if bernstein.iter().all(|&c| c == 0.0) {
        return out;
    }
    recurse(bernstein, 0.0, 1.0, &mut out);
    out
}

/// Shrinks a bracket with a strict sign change down to `tol` (or until the
/// midpoint is no longer representable between the ends) and returns its midpoint.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let lo_positive = f(lo) > 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if (v > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn trim(p: &mut Vec<f64>, scale: f64) {
    while p.len() > 1 && p[p.len() - 1].abs() <= scale * 1e-12 {
        p.pop();
    }
}

fn derivative(p: &[f64]) -> Vec<f64> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &a)| a * i as f64)
        .collect()
}

/// Remainder of `a / b` in the power basis.
fn remainder(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db];
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let q = r[r.len() - 1] / lead;
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] -= q * bi;
        }
        r.pop();
    }
    r
}

/// Number of distinct real roots of `p` (ascending power coefficients) in
/// `(0, 1)`, by Sturm's theorem. Assumes `p(0)` and `p(1)` are non-zero.
pub fn sturm_count_unit(p: &[f64]) -> usize {
    let scale = p.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if scale == 0.0 {
        return 0;
    }
    let mut p0 = p.to_vec();
    trim(&mut p0, scale);
    if p0.len() < 2 {
        return 0;
    }
    let mut chain = vec![p0.clone()];
    let mut p1 = derivative(&p0);
    trim(&mut p1, scale);
    chain.push(p1);
    loop {
        let k = chain.len();
        let prev = &chain[k - 2];
        let cur = &chain[k - 1];
        if cur.len() == 1 {
            break;
        }
        let mut r: Vec<f64> = remainder(prev, cur).into_iter().map(|x| -x).collect();
        let r_scale = prev.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        trim(&mut r, r_scale);
        if r.iter().all(|&x| x.abs() <= r_scale * 1e-12) {
            // p shares a factor with p'; the chain is complete.
            break;
        }
        chain.push(r);
    }
    let variations_at = |x: f64| {
        let values: Vec<f64> = chain.iter().map(|q| horner(q, x)).collect();
        sign_variations(&values)
    };
    variations_at(0.0).saturating_sub(variations_at(1.0))
}
