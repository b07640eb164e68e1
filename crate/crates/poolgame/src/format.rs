//! JSON documents and CSV tables.
//!
//! Every document carries the configuration that produced it: JSON under a
//! top-level `config` key, CSV as `# key=value` lines ahead of the header row.

use std::collections::BTreeMap;
use std::io::Write;

use poolgame_core::game::{CountLattice, PayoffTensor, DEFAULT_MAX_ENTRIES};
use poolgame_core::solver::DiversificationMetric;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::{Error, Result};

/// `{config?, n, m, entries: [{counts, payoffs: {"j": v}, stderr?: {"j": v}}]}`
/// with options keyed from 1 and only chosen options present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<Value>,
    pub n: usize,
    pub m: usize,
    pub entries: Vec<TensorEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorEntry {
    pub counts: Vec<u32>,
    pub payoffs: BTreeMap<usize, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<BTreeMap<usize, f64>>,
}

impl TensorDocument {
    pub fn from_tensor(tensor: &PayoffTensor, config: Option<Value>) -> Self {
        let m = tensor.m();
        let entries = (0..tensor.len())
            .map(|idx| {
                let chosen = || (0..m).filter(move |&j| tensor.counts(idx)[j] > 0);
                TensorEntry {
                    counts: tensor.counts(idx).to_vec(),
                    payoffs: chosen()
                        .map(|j| (j + 1, tensor.payoff_at(idx, j).expect("chosen")))
                        .collect(),
                    stderr: tensor.has_stderr().then(|| {
                        chosen()
                            .map(|j| (j + 1, tensor.stderr_at(idx, j).expect("chosen")))
                            .collect()
                    }),
                }
            })
            .collect();
        TensorDocument {
            config,
            n: tensor.n(),
            m,
            entries,
        }
    }

    /// Rebuilds the tensor. Every count vector must appear exactly once with
    /// a payoff for each chosen option and nothing else.
    pub fn to_tensor(&self) -> Result<PayoffTensor> {
        let (n, m) = (self.n, self.m);
        let lattice = CountLattice::new(n, m, DEFAULT_MAX_ENTRIES)?;
        let len = lattice.level_len(n);
        if self.entries.len() != len {
            return Err(Error::usage(format!(
                "expected {len} entries for n = {n}, m = {m}, found {}",
                self.entries.len()
            )));
        }
        let with_stderr = self.entries.iter().filter(|e| e.stderr.is_some()).count();
        if with_stderr != 0 && with_stderr != len {
            return Err(Error::usage("stderr must be given for all entries or none"));
        }
        let mut payoffs = vec![0.0; len * m];
        let mut stderr = (with_stderr == len && len > 0).then(|| vec![0.0; len * m]);
        let mut seen = vec![false; len];
        for e in &self.entries {
            let total: u32 = e.counts.iter().sum();
            let idx = lattice
                .index_of(&e.counts)
                .filter(|_| total as usize == n)
                .ok_or_else(|| Error::usage(format!("bad count vector {:?}", e.counts)))?;
            if std::mem::replace(&mut seen[idx], true) {
                return Err(Error::usage(format!("duplicate count vector {:?}", e.counts)));
            }
            let fill = |values: &BTreeMap<usize, f64>, out: &mut [f64], what: &str| -> Result<()> {
                let chosen = e.counts.iter().filter(|&&k| k > 0).count();
                let ok = values.len() == chosen
                    && values.keys().all(|&j| (1..=m).contains(&j) && e.counts[j - 1] > 0);
                if !ok {
                    return Err(Error::usage(format!(
                        "{what} at {:?} must list exactly the chosen options",
                        e.counts
                    )));
                }
                for (&j, &v) in values {
                    out[idx * m + j - 1] = v;
                }
                Ok(())
            };
            fill(&e.payoffs, &mut payoffs, "payoffs")?;
            if let (Some(out), Some(values)) = (stderr.as_mut(), e.stderr.as_ref()) {
                fill(values, out, "stderr")?;
            }
        }
        Ok(PayoffTensor::from_parts(lattice, payoffs, stderr)?)
    }
}

/// `body` serialized as an object with `config` added.
pub fn with_config(config: &Value, body: impl Serialize) -> Result<Value> {
    let mut value = serde_json::to_value(body)?;
    match value.as_object_mut() {
        Some(obj) => {
            obj.insert("config".into(), config.clone());
            Ok(value)
        }
        None => {
            let mut obj = serde_json::Map::new();
            obj.insert("config".into(), config.clone());
            obj.insert("result".into(), value);
            Ok(Value::Object(obj))
        }
    }
}

/// `key=value` lines for a flat JSON object; arrays are comma-joined and
/// nulls skipped.
pub fn echo_lines(config: &Value) -> Vec<String> {
    fn scalar(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(","),
            other => other.to_string(),
        }
    }
    match config.as_object() {
        Some(obj) => obj
            .iter()
            .filter(|(_, v)| !v.is_null())
            .map(|(k, v)| format!("{k}={}", scalar(v)))
            .collect(),
        None => vec![scalar(config)],
    }
}

/// Writes `# ` comment lines, a header row and the records.
pub fn write_csv<W: Write>(
    mut out: W,
    comments: &[String],
    columns: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    for line in comments {
        for part in line.lines() {
            writeln!(out, "# {part}")?;
        }
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reader that skips the `#` comment lines written by [`write_csv`].
pub fn csv_reader<R: std::io::Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input)
}

pub const METRIC_COLUMNS: [&str; 3] = ["process", "avg_prob", "stddev"];

/// One row per option: `process` (from 1), `avg_prob`, `stddev` across runs.
pub fn metric_rows(metric: &DiversificationMetric) -> Vec<Vec<String>> {
    metric
        .avg_probs
        .iter()
        .zip(&metric.dispersion)
        .enumerate()
        .map(|(j, (p, s))| vec![(j + 1).to_string(), p.to_string(), s.to_string()])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use poolgame_core::dist::{Rates, DEFAULT_TOL};
    use poolgame_core::game::{exact_poisson_tensor, mc_payoff_tensor};

    #[test]
    fn tensor_round_trip_is_exact() {
        let rates = Rates::new(vec![1.25, 1.0, 0.5]).unwrap();
        let exact = exact_poisson_tensor(3, &rates, DEFAULT_TOL).unwrap();
        let mc = mc_payoff_tensor(3, &rates, 20_000, 3).unwrap();
        for t in [exact, mc] {
            let doc = TensorDocument::from_tensor(&t, None);
            let text = serde_json::to_string(&doc).unwrap();
            let back: TensorDocument = serde_json::from_str(&text).unwrap();
            assert_eq!(back.to_tensor().unwrap(), t);
        }
    }

    #[test]
    fn option_keys_start_at_one() {
        let rates = Rates::new(vec![2.0, 1.0]).unwrap();
        let t = exact_poisson_tensor(2, &rates, DEFAULT_TOL).unwrap();
        let v = serde_json::to_value(TensorDocument::from_tensor(&t, None)).unwrap();
        let first = &v["entries"][0];
        assert_eq!(first["counts"], serde_json::json!([0, 2]));
        assert!(first["payoffs"].get("2").is_some());
        assert!(first["payoffs"].get("1").is_none());
    }

    #[test]
    fn rejects_incomplete_documents() {
        let rates = Rates::new(vec![2.0, 1.0]).unwrap();
        let t = exact_poisson_tensor(2, &rates, DEFAULT_TOL).unwrap();
        let mut doc = TensorDocument::from_tensor(&t, None);
        doc.entries.pop();
        assert!(doc.to_tensor().is_err());

        let mut doc = TensorDocument::from_tensor(&t, None);
        doc.entries[0].payoffs.insert(1, 0.0);
        assert!(doc.to_tensor().is_err());

        let mut doc = TensorDocument::from_tensor(&t, None);
        let e = doc.entries[1].payoffs.get_mut(&1).unwrap();
        *e += 0.5;
        assert!(matches!(doc.to_tensor(), Err(Error::Core(_))));
    }

    #[test]
    fn csv_comments_are_skipped_on_read() {
        let mut buf = Vec::new();
        let comments = vec!["seed=7".to_string(), "k=0.95".to_string()];
        let rows = vec![vec!["1".into(), "0.5".into(), "0.1".into()]];
        write_csv(&mut buf, &comments, &METRIC_COLUMNS, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# seed=7\n# k=0.95\nprocess,avg_prob,stddev\n"));
        let mut r = csv_reader(buf.as_slice());
        let recs: Vec<csv::StringRecord> = r.records().map(|r| r.unwrap()).collect();
        assert_eq!(recs.len(), 1);
        assert_eq!(&recs[0][1], "0.5");
    }

    #[test]
    fn echo_flattens_lists() {
        let v = serde_json::json!({"n_range": [3, 4], "k": 0.95, "out": null, "sampler": "descent"});
        let lines = echo_lines(&v);
        assert!(lines.contains(&"n_range=3,4".to_string()));
        assert!(lines.contains(&"k=0.95".to_string()));
        assert!(lines.contains(&"sampler=descent".to_string()));
        assert!(!lines.iter().any(|l| l.starts_with("out=")));
    }
}
