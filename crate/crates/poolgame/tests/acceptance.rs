//! Acceptance checks, one line per criterion.
//!
//! Run with `cargo test -p poolgame --test acceptance`. Exits non-zero if any
//! criterion fails; runtimes are compared against each criterion's budget.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use poolgame::{grid, parallel};
use poolgame_core::analytic::{
    self, greedy_best_response, symmetric_equilibria_two_process, EquilibriumKind, Verdict,
};
use poolgame_core::dist::{self, Rates, DEFAULT_TOL};
use poolgame_core::game::{exact_payoff_tensor, exact_poisson_tensor, OrderedPartition, OutcomeDistribution};
use poolgame_core::rng::derive_seed;
use poolgame_core::solver::Sampler;
use poolgame_core::ProcessSet;

type Check = Result<String, String>;

fn uniform(seed: u64, i: u64) -> f64 {
    (derive_seed(seed, i) >> 11) as f64 / (1u64 << 53) as f64
}

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn core<T>(r: poolgame_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn interior_s1(n: usize, c: f64) -> Result<f64, String> {
    let eqs = core(symmetric_equilibria_two_process(n, c))?;
    let roots: Vec<f64> = eqs
        .iter()
        .filter(|e| e.kind == EquilibriumKind::Interior)
        .map(|e| e.s1)
        .collect();
    match roots.as_slice() {
        [s] => Ok(*s),
        _ => Err(format!("n = {n}, c = {c}: {} interior roots", roots.len())),
    }
}

fn intro_game() -> Check {
    let outcome = core(OutcomeDistribution::new(vec![
        (core(OrderedPartition::from_labels(2, &[&[1], &[2]]))?, 0.6),
        (core(OrderedPartition::from_labels(2, &[&[2], &[1]]))?, 0.4),
    ]))?;
    let t = core(exact_payoff_tensor(3, &outcome))?;
    let v = t.payoff(&[2, 1], 1).ok_or("missing entry")?;
    let err = (v - 0.2).abs();
    ensure(err < 1e-12, format!("underdog payoff {v} (|err| {err:.1e})"))
}

fn closed_form_three() -> Check {
    let mut worst: f64 = 0.0;
    for i in 1..=50 {
        let c = 0.5 + 1.5 * i as f64 / 51.0;
        let s = interior_s1(3, c)?;
        worst = worst.max((s - (2.0 * c - 1.0) / (c + 1.0)).abs());
    }
    ensure(worst < 1e-9, format!("50 values of c, max |s1 - (2c-1)/(c+1)| = {worst:.1e}"))
}

/// Root in (0, 1) of `(c-1)s^2 - (3c+1)s + (3c-1)`, rationalized so it also holds at c = 1.
fn quadratic_root(c: f64) -> f64 {
    let b = 3.0 * c + 1.0;
    let disc = b * b - 4.0 * (c - 1.0) * (3.0 * c - 1.0);
    2.0 * (3.0 * c - 1.0) / (b + disc.sqrt())
}

fn closed_form_four() -> Check {
    let mut worst: f64 = 0.0;
    for i in 1..=50 {
        let c = 1.0 / 3.0 + (3.0 - 1.0 / 3.0) * i as f64 / 51.0;
        let s = interior_s1(4, c)?;
        worst = worst.max((s - quadratic_root(c)).abs());
    }
    let at_one = (interior_s1(4, 1.0)? - 0.5).abs();
    ensure(
        worst < 1e-9 && at_one < 1e-12,
        format!("50 values of c, max |err| = {worst:.1e}; |s1(c=1) - 1/2| = {at_one:.1e}"),
    )
}

fn symmetric_value() -> Result<f64, String> {
    let c = core(dist::compare(1.25, 1.0, DEFAULT_TOL))?.odds_ratio;
    interior_s1(3, c)
}

fn symmetric_value_check() -> Check {
    let s1 = symmetric_value()?;
    ensure((s1 - 0.76).abs() <= 0.01, format!("s1 = {s1:.6} (target 0.76 +/- 0.01)"))
}

fn ensemble_below_symmetric() -> Check {
    let s1 = symmetric_value()?;
    let rates = core(Rates::new(vec![1.25, 1.0]))?;
    let t = core(exact_poisson_tensor(3, &rates, DEFAULT_TOL))?;
    let m = parallel::diversification_metric(&t, 100, 2024, Sampler::default())
        .map_err(|e| e.to_string())?;
    let avg = m.avg_probs[0];
    ensure(
        avg < s1,
        format!(
            "ensemble average {avg:.4} < symmetric {s1:.4}; distance to 0.70 is {:.4} (not gated); {} of 100 runs failed",
            (avg - 0.70).abs(),
            m.failed_runs
        ),
    )
}

fn two_agent_dominance() -> Check {
    let mut i = 0u64;
    for case in 0..200u64 {
        let m = 2 + (uniform(6, case) * 4.0) as usize;
        let lambda: Vec<f64> = (0..m)
            .map(|_| {
                i += 1;
                0.2 + 4.8 * uniform(66, i)
            })
            .collect();
        let rates = core(Rates::new(lambda))?;
        let t = core(exact_poisson_tensor(2, &rates, DEFAULT_TOL))?;
        let br = core(analytic::two_agent_best_response(&t))?;
        let top = rates.argmax();
        if br.dominant != Some(top) || br.per_opponent.iter().any(|&s| s != top) {
            return Err(format!("rates {:?}: best replies {:?}", rates.as_slice(), br.per_opponent));
        }
    }
    Ok("200 rate vectors, m in 2..=5: the max-rate option is the best reply to every choice".into())
}

fn counterexample() -> Check {
    let parts: [&[&[usize]]; 4] = [
        &[&[5], &[1], &[2], &[4], &[3]],
        &[&[5], &[4], &[3], &[1], &[2]],
        &[&[1], &[2], &[4], &[3], &[5]],
        &[&[4], &[3], &[1], &[2], &[5]],
    ];
    let support = parts
        .iter()
        .map(|p| Ok((core(OrderedPartition::from_labels(5, p))?, 0.25)))
        .collect::<Result<Vec<_>, String>>()?;
    let t = core(exact_payoff_tensor(2, &core(OutcomeDistribution::new(support))?))?;
    let br = core(analytic::two_agent_best_response(&t))?;
    let to3 = br.per_opponent[2];
    let to2 = br.per_opponent[1];
    ensure(
        to3 == ProcessSet::singleton(3) && to2 == ProcessSet::singleton(0) && br.dominant.is_none(),
        format!(
            "best reply to 3 is {:?}, to 2 is {:?} (options from 1), no dominant option",
            to3.iter().map(|j| j + 1).collect::<Vec<_>>(),
            to2.iter().map(|j| j + 1).collect::<Vec<_>>()
        ),
    )
}

fn greedy_consistency() -> Check {
    let (mut checked, mut excluded, mut worst) = (0, 0, 0.0f64);
    for case in 0..100u64 {
        let n = 2 + (uniform(8, case) * 5.0) as usize;
        let a = 0.2 + 4.8 * uniform(88, case);
        let b = 0.2 + 4.8 * uniform(888, case);
        let rates = core(Rates::new(vec![a.max(b), a.min(b)]))?;
        let g = core(greedy_best_response(n, &rates, 0))?;
        let t = core(exact_poisson_tensor(n, &rates, DEFAULT_TOL))?;
        let deviate = t.payoff(&[n as u32 - 1, 1], 1).ok_or("missing entry")?;
        let stay = t.payoff(&[n as u32, 0], 0).ok_or("missing entry")?;
        let gain = deviate - stay;
        worst = worst.max((gain - (n - 1) as f64 * g.threshold_gap).abs());
        if g.threshold_gap.abs() <= 1e-9 {
            excluded += 1;
            continue;
        }
        checked += 1;
        let agrees = match g.verdict {
            Verdict::UniquelyDeviate(_) => gain > 0.0,
            Verdict::UniquelyFavorite => gain < 0.0,
            Verdict::Indifferent => false,
        };
        if !agrees {
            return Err(format!("n = {n}, rates {:?}: verdict {:?}, gain {gain}", rates.as_slice(), g.verdict));
        }
    }
    ensure(
        worst < 1e-10,
        format!("{checked} verdicts match the tensor ({excluded} at indifference); max |gain - (n-1) gap| = {worst:.1e}"),
    )
}

fn boundary_monotone() -> Check {
    let lambda1 = grid::linear(0.1, 10.0, 200).map_err(|e| e.to_string())?;
    let curves = parallel::boundary_curves(&[2, 3, 4, 5, 6, 7], &lambda1).map_err(|e| e.to_string())?;
    for p in &curves[0].1 {
        if p.lambda2 != Some(p.lambda1) {
            return Err(format!("n = 2 at lambda1 = {}: {:?}", p.lambda1, p.lambda2));
        }
    }
    for w in curves.windows(2) {
        let ((n, lo), (_, hi)) = (&w[0], &w[1]);
        for (p, q) in lo.iter().zip(hi) {
            match (p.lambda2, q.lambda2) {
                (Some(a), Some(b)) if b < a => {}
                _ => {
                    return Err(format!(
                        "lambda1 = {}: n = {n} gives {:?}, n = {} gives {:?}",
                        p.lambda1,
                        p.lambda2,
                        n + 1,
                        q.lambda2
                    ))
                }
            }
        }
    }
    Ok("200 points on [0.1, 10]: n = 2 is the diagonal and lambda2*(n+1) < lambda2*(n) for n = 2..6".into())
}

fn ensemble_at(n: usize, m: usize, k: f64, offset: f64) -> Result<poolgame_core::solver::DiversificationMetric, String> {
    let rates = core(Rates::geometric(k, m, offset))?;
    let t = core(exact_poisson_tensor(n, &rates, DEFAULT_TOL))?;
    parallel::diversification_metric(&t, 100, 1, Sampler::default()).map_err(|e| e.to_string())
}

fn qualitative_regimes() -> Check {
    let mut notes = Vec::new();
    let mut ok = true;

    let p3 = ensemble_at(3, 3, 0.95, 0.0)?;
    let p4 = ensemble_at(4, 3, 0.95, 0.0)?;
    let drop = p3.avg_probs[0] - p4.avg_probs[0];
    ok &= drop > 0.0;
    notes.push(format!(
        "(a) process 1: {:.3} -> {:.3}",
        p3.avg_probs[0], p4.avg_probs[0]
    ));

    let low = ensemble_at(5, 3, 0.65, 0.0)?;
    ok &= low.avg_probs[2] < 0.03;
    notes.push(format!("(b) process 3 at n = 5: {:.4}", low.avg_probs[2]));

    let lines = [(3, 3), (4, 3), (5, 3), (3, 4), (3, 5)];
    let mut parts = Vec::new();
    for (n, m) in lines {
        let h = |offset| ensemble_at(n, m, 0.95, offset).map(|e| e.entropy());
        let (minus, zero, plus) = (h(-0.5)?, h(0.0)?, h(1.0)?);
        ok &= minus < zero && zero < plus;
        parts.push(format!("n{n}m{m} {minus:.3}<{zero:.3}<{plus:.3}"));
    }
    notes.push(format!("(c) entropy at offsets -0.5, 0, +1: {}", parts.join(", ")));
    ensure(ok, notes.join("; "))
}

fn mc_agreement() -> Check {
    let (mut entries, mut worst) = (0usize, 0.0f64);
    for case in 0..20u64 {
        let n = 2 + (uniform(11, case) * 3.0) as usize;
        let m = 2 + (uniform(111, case) * 2.0) as usize;
        let lambda: Vec<f64> = (0..m as u64)
            .map(|j| 0.2 + 4.8 * uniform(1111 + j, case))
            .collect();
        let rates = core(Rates::new(lambda))?;
        let exact = core(exact_poisson_tensor(n, &rates, DEFAULT_TOL))?;
        let mc = parallel::mc_payoff_tensor(n, &rates, 1_000_000, case).map_err(|e| e.to_string())?;
        for idx in 0..exact.len() {
            for j in 0..m {
                let (Some(e), Some(v), Some(se)) = (exact.payoff_at(idx, j), mc.payoff_at(idx, j), mc.stderr_at(idx, j))
                else {
                    continue;
                };
                entries += 1;
                let z = if se > 0.0 {
                    (v - e).abs() / se
                } else if (v - e).abs() <= 1e-12 {
                    0.0
                } else {
                    f64::INFINITY
                };
                worst = worst.max(z);
                if z > 4.0 {
                    return Err(format!(
                        "n = {n}, rates {:?}, counts {:?}, option {}: {z:.2} standard errors",
                        rates.as_slice(),
                        exact.counts(idx),
                        j + 1
                    ));
                }
            }
        }
    }
    Ok(format!("20 instances, {entries} entries at 1e6 samples; largest deviation {worst:.2} standard errors"))
}

fn conjecture() -> Check {
    let reports = parallel::conjecture_probes(&[3, 4, 5, 6], 50).map_err(|e| e.to_string())?;
    let summary: Vec<String> = reports
        .iter()
        .map(|r| {
            format!(
                "n={} unique={} increasing={} findings={}",
                r.n,
                r.unique,
                r.strictly_increasing,
                r.findings.len()
            )
        })
        .collect();
    for r in &reports {
        for f in &r.findings {
            println!("       finding (n = {}): {f}", r.n);
        }
    }
    Ok(format!("50 interior points each: {}", summary.join("; ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Check); 12] = [
        ("intro-game payoff", Duration::from_millis(1), intro_game),
        ("n=3 closed form", Duration::from_secs(1), closed_form_three),
        ("n=4 closed form", Duration::from_secs(1), closed_form_four),
        ("symmetric value 0.76", Duration::from_secs(1), symmetric_value_check),
        ("ensemble below symmetric", Duration::from_secs(120), ensemble_below_symmetric),
        ("two-agent max-rate dominance", Duration::from_secs(60), two_agent_dominance),
        ("counterexample best replies", Duration::from_millis(1), counterexample),
        ("greedy-threshold consistency", Duration::from_secs(30), greedy_consistency),
        ("boundary monotonicity", Duration::from_secs(60), boundary_monotone),
        ("qualitative sweep regimes", Duration::from_secs(600), qualitative_regimes),
        ("Monte Carlo vs exact", Duration::from_secs(300), mc_agreement),
        ("conjecture probe", Duration::from_secs(120), conjecture),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let in_time = took <= budget;
        let (pass, detail) = match result {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {detail} [{:.3?} of {:?}{}]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            took,
            budget,
            if in_time { "" } else { ", over budget" }
        );
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
