//! Sweep configuration and its `key=value` file format.
//!
//! ```text
//! # k-sweep, first plot
//! n_range = 3-5
//! m_range = 3
//! k = 0.95
//! offset = 0
//! t = 100
//! seed = 1
//! ```
//!
//! Blank lines and `#` comments are ignored. Keys: `n_range`, `m_range`, `k`,
//! `offset`, `t`, `seed`, `samples`, `exact`, `sampler`, `out`.

use std::path::PathBuf;

use poolgame_core::dist::Rates;
use poolgame_core::solver::Sampler;
use serde::Serialize;

use crate::{grid, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub n_range: Vec<usize>,
    pub m_range: Vec<usize>,
    /// Rates are `k^(j-1) + offset`.
    pub k: f64,
    pub offset: f64,
    /// Ensemble runs per `(n, m)`.
    pub t: usize,
    pub seed: u64,
    /// Estimate payoffs by Monte Carlo with this many samples.
    pub samples: Option<u64>,
    /// Use exact tensors even when `samples` is set.
    pub exact: bool,
    pub sampler: Sampler,
    pub out: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n_range: vec![3],
            m_range: vec![3],
            k: 0.95,
            offset: 0.0,
            t: 100,
            seed: 0,
            samples: None,
            exact: false,
            sampler: Sampler::default(),
            out: None,
        }
    }
}

pub fn parse_sampler(value: &str) -> Result<Sampler> {
    match value {
        "descent" => Ok(Sampler::Descent),
        "dynamics" => Ok(Sampler::Dynamics),
        _ => Err(Error::usage(format!(
            "unknown sampler `{value}` (expected descent or dynamics)"
        ))),
    }
}

fn parse_bool(value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::usage(format!("`{value}` is not a boolean"))),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::usage(format!("bad value `{value}` for {key}")))
}

impl SweepConfig {
    /// Defaults overridden by the lines of `text`, then validated.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SweepConfig::default();
        cfg.apply(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies the assignments in `text` without validating.
    pub fn apply(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::usage(format!("line {}: expected key=value", lineno + 1))
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::usage(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n_range" | "n" => self.n_range = grid::parse_list(value)?,
            "m_range" | "m" => self.m_range = grid::parse_list(value)?,
            "k" => self.k = parse_num(key, value)?,
            "offset" => self.offset = parse_num(key, value)?,
            "t" => self.t = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "samples" => self.samples = Some(parse_num(key, value)?),
            "exact" => self.exact = parse_bool(value)?,
            "sampler" => self.sampler = parse_sampler(value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            _ => return Err(Error::usage(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_range.is_empty() || self.m_range.is_empty() {
            return Err(Error::usage("n_range and m_range must be non-empty"));
        }
        if let Some(&n) = self.n_range.iter().find(|&&n| n < 2) {
            return Err(Error::usage(format!("n = {n}: at least two agents are required")));
        }
        if let Some(&m) = self.m_range.iter().find(|&&m| m < 2) {
            return Err(Error::usage(format!("m = {m}: at least two processes are required")));
        }
        if !(self.k > 0.0 && self.k < 1.0) {
            return Err(Error::usage(format!("k = {} must lie in (0, 1)", self.k)));
        }
        if !self.offset.is_finite() {
            return Err(Error::usage("offset must be finite"));
        }
        if self.t == 0 {
            return Err(Error::usage("t must be at least 1"));
        }
        for &m in &self.m_range {
            self.rates(m)?;
        }
        Ok(())
    }

    /// `λ_j = k^(j-1) + offset`, `j = 1..=m`.
    pub fn rates(&self, m: usize) -> Result<Rates> {
        Rates::geometric(self.k, m, self.offset).map_err(|e| {
            Error::usage(format!(
                "k = {}, offset = {}, m = {m} gives a non-positive rate ({e})",
                self.k, self.offset
            ))
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file() {
        let cfg = SweepConfig::parse(
            "# first plot\nn_range = 3-5\nm_range=3\nk = 0.95 # decay\nt=10\nseed=42\nsampler=dynamics\n",
        )
        .unwrap();
        assert_eq!(cfg.n_range, vec![3, 4, 5]);
        assert_eq!(cfg.m_range, vec![3]);
        assert_eq!(cfg.k, 0.95);
        assert_eq!(cfg.t, 10);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.sampler, Sampler::Dynamics);
        assert_eq!(cfg.samples, None);
    }

    #[test]
    fn rejects_non_positive_rates() {
        // 0.65^2 - 0.5 < 0
        let err = SweepConfig::parse("k=0.65\noffset=-0.5\nm_range=3").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(SweepConfig::parse("k=0.95\noffset=-0.5\nm_range=3").is_ok());
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(SweepConfig::parse("k").is_err());
        assert!(SweepConfig::parse("colour=red").is_err());
        assert!(SweepConfig::parse("k=1.5").is_err());
        assert!(SweepConfig::parse("t=0").is_err());
        assert!(SweepConfig::parse("n_range=1,3").is_err());
    }

    #[test]
    fn json_uses_kebab_sampler() {
        let v = SweepConfig::default().to_json();
        assert_eq!(v["sampler"], "descent");
        assert_eq!(v["n_range"], serde_json::json!([3]));
    }
}
