//! Command-line interface of the `poolgame` binary.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use poolgame_core::analytic::{self, Verdict};
use poolgame_core::dist::{self, Rates};
use poolgame_core::game::{exact_poisson_tensor, PayoffTensor};
use poolgame_core::solver::{self, Sampler};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::SweepConfig;
use crate::format::{self, echo_lines, with_config, TensorDocument};
use crate::{grid, parallel, sweep, Error, Result};

#[derive(Debug, Parser)]
#[command(name = "poolgame", version, about = "Winners-take-all pool games: probabilities, payoffs and equilibria")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probabilities that one Poisson count beats, loses to or ties another (JSON)
    Compare(CompareArgs),
    /// Favorite/underdog boundary curves; CSV columns n, lambda1, lambda2
    Boundary(BoundaryArgs),
    /// Symmetric equilibria of a two-process pool (JSON)
    SymmetricEq(SymmetricEqArgs),
    /// Interior symmetric equilibrium along an odds grid; CSV columns n, c, s1, root_count
    Probe(ProbeArgs),
    /// Diversification sweep; CSV columns n, m, process, avg_prob, stddev
    Sweep(SweepArgs),
    /// Expected payoff tensor of a Poisson-picking pool (JSON)
    Payoff(PayoffArgs),
    /// Equilibria of a pool game with a regret certificate (JSON)
    Solve(SolveArgs),
    /// Ensemble diversification metric (JSON or CSV)
    Ensemble(EnsembleArgs),
    /// Best reply to n-1 agents all backing the favorite (JSON)
    Greedy(GreedyArgs),
    /// Pure best replies of a two-agent pool (JSON)
    BestResponse(BestResponseArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub l1: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub l2: f64,
    /// Truncation tolerance, at most 1e-8
    #[arg(long, default_value_t = dist::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundaryArgs {
    /// Agent counts, e.g. `2-6` or `3,5`
    #[arg(long, default_value = "2-6")]
    pub n_list: String,
    #[arg(long, default_value_t = 0.1)]
    pub l1_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub l1_max: f64,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SymmetricEqArgs {
    #[arg(long)]
    pub n: usize,
    /// Odds ratio P(Y1 > Y2) / P(Y1 < Y2)
    #[arg(long, required_unless_present_all = ["l1", "l2"], conflicts_with_all = ["l1", "l2"])]
    pub c: Option<f64>,
    #[arg(long, requires = "l2")]
    pub l1: Option<f64>,
    #[arg(long, requires = "l1")]
    pub l2: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct ProbeArgs {
    #[arg(long, default_value = "3-6")]
    pub n_list: String,
    /// Grid points strictly inside (1/(n-1), n-1), log-spaced
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct SweepArgs {
    /// key=value file; flags given here override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n_range: Option<String>,
    #[arg(long)]
    pub m_range: Option<String>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub offset: Option<f64>,
    #[arg(short, long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Estimate payoffs by Monte Carlo
    #[arg(long)]
    pub samples: Option<u64>,
    /// Exact payoffs even if --samples is given
    #[arg(long)]
    pub exact: bool,
    #[arg(long, value_enum)]
    pub sampler: Option<SamplerArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct PayoffArgs {
    #[arg(long)]
    pub n: usize,
    /// Comma-separated rates, e.g. `1.25,1`
    #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    pub rates: Vec<f64>,
    /// Monte Carlo samples instead of exact probabilities
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Where a game comes from: a tensor file or rates.
#[derive(Debug, Args, Serialize)]
pub struct GameArgs {
    /// Tensor JSON as written by `payoff`
    #[arg(long, conflicts_with_all = ["n", "rates", "samples"])]
    pub tensor: Option<PathBuf>,
    #[arg(long, required_unless_present = "tensor")]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',', num_args = 1.., required_unless_present = "tensor", allow_negative_numbers = true)]
    pub rates: Vec<f64>,
    #[arg(long)]
    pub samples: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Symmetric equilibria from random starts
    Symmetric,
    /// One equilibrium by regret descent
    Descent,
    /// One equilibrium by smoothed best-response dynamics
    Dynamics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerArg {
    Descent,
    Dynamics,
}

impl From<SamplerArg> for Sampler {
    fn from(s: SamplerArg) -> Self {
        match s {
            SamplerArg::Descent => Sampler::Descent,
            SamplerArg::Dynamics => Sampler::Dynamics,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SolveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub game: GameArgs,
    #[arg(long, value_enum, default_value = "symmetric")]
    pub method: Method,
    /// Random starts for the symmetric search
    #[arg(long, default_value_t = 20)]
    pub starts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = solver::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Args, Serialize)]
pub struct EnsembleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub game: GameArgs,
    #[arg(short, long, default_value_t = 100)]
    pub t: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "descent")]
    pub sampler: SamplerArg,
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct GreedyArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    pub rates: Vec<f64>,
    /// Option the first n-1 agents back (from 1); defaults to the first highest rate
    #[arg(long)]
    pub favorite: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct BestResponseArgs {
    /// Two-agent tensor JSON as written by `payoff --n 2`
    #[arg(long, conflicts_with = "rates", required_unless_present = "rates")]
    pub tensor: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    pub rates: Vec<f64>,
}

/// The invocation as a JSON object with a `command` key.
fn invocation(command: &str, args: &impl Serialize) -> Value {
    let mut v = serde_json::to_value(args).expect("plain data");
    if let Some(obj) = v.as_object_mut() {
        obj.insert("command".into(), json!(command));
    }
    v
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|source| Error::Io {
            path: p.to_path_buf(),
            source,
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(path: Option<&Path>, value: &Value) -> Result<()> {
    let mut out = sink(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_tensor(path: &Path) -> Result<PayoffTensor> {
    let doc: TensorDocument = serde_json::from_str(&read_to_string(path)?)?;
    doc.to_tensor()
}

fn rates(values: &[f64]) -> Result<Rates> {
    Ok(Rates::new(values.to_vec())?)
}

fn poisson_tensor(n: usize, rates: &Rates, samples: Option<u64>, seed: u64) -> Result<PayoffTensor> {
    match samples {
        Some(s) => parallel::mc_payoff_tensor(n, rates, s, seed),
        None => Ok(exact_poisson_tensor(n, rates, dist::DEFAULT_TOL)?),
    }
}

fn game_tensor(game: &GameArgs, seed: u64) -> Result<PayoffTensor> {
    match &game.tensor {
        Some(path) => load_tensor(path),
        None => {
            let n = game.n.ok_or_else(|| Error::usage("--n is required"))?;
            poisson_tensor(n, &rates(&game.rates)?, game.samples, seed)
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Compare(a) => compare(&a),
        Command::Boundary(a) => boundary(&a),
        Command::SymmetricEq(a) => symmetric_eq(&a),
        Command::Probe(a) => probe(&a),
        Command::Sweep(a) => sweep_cmd(&a),
        Command::Payoff(a) => payoff(&a),
        Command::Solve(a) => solve(&a),
        Command::Ensemble(a) => ensemble(&a),
        Command::Greedy(a) => greedy(&a),
        Command::BestResponse(a) => best_response(&a),
    }
}

fn compare(a: &CompareArgs) -> Result<()> {
    let probs = dist::compare(a.l1, a.l2, a.tol)?;
    write_json(None, &with_config(&invocation("compare", a), probs)?)
}

fn boundary(a: &BoundaryArgs) -> Result<()> {
    let n_list = grid::parse_list(&a.n_list)?;
    if a.l1_min <= 0.0 {
        return Err(Error::usage("--l1-min must be positive"));
    }
    let lambda1 = grid::linear(a.l1_min, a.l1_max, a.points)?;
    let curves = parallel::boundary_curves(&n_list, &lambda1)?;
    let mut rows = Vec::new();
    for (n, points) in &curves {
        for p in points {
            rows.push(vec![
                n.to_string(),
                p.lambda1.to_string(),
                p.lambda2.map(|l| l.to_string()).unwrap_or_default(),
            ]);
        }
    }
    let mut comments = vec!["poolgame boundary".to_string()];
    comments.extend(echo_lines(&invocation("boundary", a)));
    comments.push("lambda2 is empty where no boundary exists in (0, lambda1]".into());
    format::write_csv(sink(a.out.as_deref())?, &comments, &["n", "lambda1", "lambda2"], &rows)
}

fn symmetric_eq(a: &SymmetricEqArgs) -> Result<()> {
    let c = match (a.c, a.l1, a.l2) {
        (Some(c), _, _) => c,
        (None, Some(l1), Some(l2)) => dist::compare(l1, l2, dist::DEFAULT_TOL)?.odds_ratio,
        _ => return Err(Error::usage("give --c or both --l1 and --l2")),
    };
    let equilibria = analytic::symmetric_equilibria_two_process(a.n, c)?;
    let body = json!({ "c": c, "equilibria": equilibria });
    write_json(None, &with_config(&invocation("symmetric-eq", a), body)?)
}

fn probe(a: &ProbeArgs) -> Result<()> {
    let n_list = grid::parse_list(&a.n_list)?;
    let reports = parallel::conjecture_probes(&n_list, a.points)?;
    let mut comments = vec!["poolgame probe".to_string()];
    comments.extend(echo_lines(&invocation("probe", a)));
    comments.push("root_count counts distinct real roots in (0, 1); one row per located equilibrium".into());
    let mut rows = Vec::new();
    for r in &reports {
        comments.push(format!(
            "n={} unique={} strictly_increasing={}",
            r.n, r.unique, r.strictly_increasing
        ));
        for f in &r.findings {
            eprintln!("finding (n = {}): {f}", r.n);
            comments.push(format!("finding n={}: {f}", r.n));
        }
        for row in &r.rows {
            for s1 in &row.roots {
                rows.push(vec![
                    r.n.to_string(),
                    row.c.to_string(),
                    s1.to_string(),
                    row.sturm_count.to_string(),
                ]);
            }
        }
    }
    format::write_csv(sink(a.out.as_deref())?, &comments, &["n", "c", "s1", "root_count"], &rows)
}

/// Config file (if any) overridden by explicit flags.
pub fn sweep_config(a: &SweepArgs) -> Result<SweepConfig> {
    let mut cfg = SweepConfig::default();
    if let Some(path) = &a.config {
        cfg.apply(&read_to_string(path)?)?;
    }
    if let Some(v) = &a.n_range {
        cfg.n_range = grid::parse_list(v)?;
    }
    if let Some(v) = &a.m_range {
        cfg.m_range = grid::parse_list(v)?;
    }
    if let Some(v) = a.k {
        cfg.k = v;
    }
    if let Some(v) = a.offset {
        cfg.offset = v;
    }
    if let Some(v) = a.t {
        cfg.t = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = a.samples {
        cfg.samples = Some(v);
    }
    if a.exact {
        cfg.exact = true;
    }
    if let Some(v) = a.sampler {
        cfg.sampler = v.into();
    }
    if let Some(v) = &a.out {
        cfg.out = Some(v.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn sweep_cmd(a: &SweepArgs) -> Result<()> {
    let cfg = sweep_config(a)?;
    let blocks = sweep::run(&cfg)?;
    sweep::write_csv(sink(cfg.out.as_deref())?, &cfg, &blocks)
}

fn payoff(a: &PayoffArgs) -> Result<()> {
    let tensor = poisson_tensor(a.n, &rates(&a.rates)?, a.samples, a.seed)?;
    let doc = TensorDocument::from_tensor(&tensor, Some(invocation("payoff", a)));
    write_json(a.out.as_deref(), &serde_json::to_value(doc)?)
}

fn solve(a: &SolveArgs) -> Result<()> {
    let tensor = game_tensor(&a.game, a.seed)?;
    let config = invocation("solve", a);
    let body = match a.method {
        Method::Symmetric => {
            let search = solver::find_symmetric_equilibrium(&tensor, a.starts, a.seed, a.tol)?;
            if search.results.is_empty() {
                let best = search
                    .diagnostics
                    .iter()
                    .map(|d| d.regret)
                    .fold(f64::INFINITY, f64::min);
                return Err(poolgame_core::Error::NonConvergence(format!(
                    "no start reached regret {} (best {best:e})",
                    a.tol
                ))
                .into());
            }
            serde_json::to_value(search)?
        }
        Method::Descent | Method::Dynamics => {
            let result = if a.method == Method::Descent {
                solver::regret_descent(&tensor, a.seed, a.tol)?
            } else {
                solver::best_response_dynamics(&tensor, a.seed, a.tol)?
            };
            if !result.converged {
                return Err(poolgame_core::Error::NonConvergence(format!(
                    "regret {:e} after {} iterations",
                    result.regret, result.iterations
                ))
                .into());
            }
            let certified = solver::certify_regret(&result.profile, &tensor).ok();
            let mut v = serde_json::to_value(&result)?;
            v["certified_regret"] = json!(certified);
            v
        }
    };
    write_json(a.out.as_deref(), &with_config(&config, body)?)
}

fn ensemble(a: &EnsembleArgs) -> Result<()> {
    let tensor = game_tensor(&a.game, a.seed)?;
    let metric = parallel::diversification_metric(&tensor, a.t, a.seed, a.sampler.into())?;
    let config = invocation("ensemble", a);
    match a.format {
        OutputFormat::Json => {
            let mut body = serde_json::to_value(&metric)?;
            body["entropy"] = json!(metric.entropy());
            write_json(a.out.as_deref(), &with_config(&config, body)?)
        }
        OutputFormat::Csv => {
            let mut comments = vec!["poolgame ensemble".to_string()];
            comments.extend(echo_lines(&config));
            comments.push(format!("failed_runs={}", metric.failed_runs));
            format::write_csv(
                sink(a.out.as_deref())?,
                &comments,
                &format::METRIC_COLUMNS,
                &format::metric_rows(&metric),
            )
        }
    }
}

fn greedy(a: &GreedyArgs) -> Result<()> {
    let rates = rates(&a.rates)?;
    let favorite = match a.favorite {
        Some(0) => return Err(Error::usage("options are numbered from 1")),
        Some(f) => f - 1,
        None => rates.argmax().iter().next().expect("non-empty"),
    };
    let r = analytic::greedy_best_response(a.n, &rates, favorite)?;
    let verdict = match r.verdict {
        Verdict::UniquelyFavorite => "UNIQUELY_FAVORITE",
        Verdict::UniquelyDeviate(_) => "UNIQUELY_DEVIATE",
        Verdict::Indifferent => "INDIFFERENT",
    };
    let body = json!({
        "verdict": verdict,
        "favorite": favorite + 1,
        "deviant": r.deviant + 1,
        "threshold_gap": r.threshold_gap,
        "deviation_payoff": (a.n - 1) as f64 * r.threshold_gap,
        "comparison": r.comparison,
    });
    write_json(None, &with_config(&invocation("greedy", a), body)?)
}

fn best_response(a: &BestResponseArgs) -> Result<()> {
    let (tensor, max_rate) = match &a.tensor {
        Some(path) => (load_tensor(path)?, None),
        None => {
            let rates = rates(&a.rates)?;
            let t = exact_poisson_tensor(2, &rates, dist::DEFAULT_TOL)?;
            (t, Some(rates.argmax()))
        }
    };
    let br = analytic::two_agent_best_response(&tensor)?;
    let labels = |s: poolgame_core::ProcessSet| s.iter().map(|j| j + 1).collect::<Vec<_>>();
    let per_opponent: Vec<Value> = br
        .per_opponent
        .iter()
        .enumerate()
        .map(|(k, &s)| json!({ "opponent": k + 1, "best": labels(s) }))
        .collect();
    let body = json!({
        "per_opponent": per_opponent,
        "dominant": br.dominant.map(labels),
        "max_rate": max_rate.map(labels),
    });
    write_json(None, &with_config(&invocation("best-response", a), body)?)
}
