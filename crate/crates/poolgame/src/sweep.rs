//! Diversification sweeps over agent and process counts.

use std::io::Write;

use poolgame_core::dist::DEFAULT_TOL;
use poolgame_core::game::{exact_poisson_tensor, PayoffTensor};
use poolgame_core::solver::DiversificationMetric;
use serde::Serialize;

use crate::config::SweepConfig;
use crate::format::{self, echo_lines};
use crate::{parallel, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum TensorSource {
    Exact,
    MonteCarlo { samples: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepBlock {
    pub n: usize,
    pub m: usize,
    pub rates: Vec<f64>,
    pub source: TensorSource,
    pub metric: DiversificationMetric,
}

/// Monte Carlo with `cfg.samples` draws when samples are set and `cfg.exact`
/// is not, the exact tensor otherwise. Both share the count-lattice bound,
/// so a game too large for one is too large for the other and the error
/// names that bound.
pub fn build_tensor(cfg: &SweepConfig, n: usize, m: usize) -> Result<(PayoffTensor, TensorSource)> {
    let rates = cfg.rates(m)?;
    match cfg.samples {
        Some(samples) if !cfg.exact => {
            let t = parallel::mc_payoff_tensor(n, &rates, samples, cfg.seed)?;
            Ok((t, TensorSource::MonteCarlo { samples }))
        }
        _ => Ok((exact_poisson_tensor(n, &rates, DEFAULT_TOL)?, TensorSource::Exact)),
    }
}

/// Runs the ensemble for every `(n, m)` in the ranges, `m` varying fastest.
pub fn run(cfg: &SweepConfig) -> Result<Vec<SweepBlock>> {
    cfg.validate()?;
    let mut blocks = Vec::new();
    for &n in &cfg.n_range {
        for &m in &cfg.m_range {
            let (tensor, source) = build_tensor(cfg, n, m)?;
            let metric = parallel::diversification_metric(&tensor, cfg.t, cfg.seed, cfg.sampler)?;
            blocks.push(SweepBlock {
                n,
                m,
                rates: cfg.rates(m)?.as_slice().to_vec(),
                source,
                metric,
            });
        }
    }
    Ok(blocks)
}

pub const COLUMNS: [&str; 5] = ["n", "m", "process", "avg_prob", "stddev"];

pub fn rows(blocks: &[SweepBlock]) -> Vec<Vec<String>> {
    blocks
        .iter()
        .flat_map(|b| {
            format::metric_rows(&b.metric).into_iter().map(move |mut r| {
                r.insert(0, b.m.to_string());
                r.insert(0, b.n.to_string());
                r
            })
        })
        .collect()
}

/// CSV with the config and per-block details echoed as comments.
pub fn write_csv<W: Write>(out: W, cfg: &SweepConfig, blocks: &[SweepBlock]) -> Result<()> {
    let mut comments = vec!["poolgame sweep".to_string()];
    comments.extend(echo_lines(&cfg.to_json()));
    for b in blocks {
        let source = match b.source {
            TensorSource::Exact => "exact".to_string(),
            TensorSource::MonteCarlo { samples } => format!("monte-carlo samples={samples}"),
        };
        let rates: Vec<String> = b.rates.iter().map(f64::to_string).collect();
        comments.push(format!(
            "block n={} m={} rates={} tensor={source} failed_runs={}",
            b.n,
            b.m,
            rates.join(","),
            b.metric.failed_runs
        ));
    }
    format::write_csv(out, &comments, &COLUMNS, &rows(blocks))
}
