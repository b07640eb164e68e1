use poolgame_core::analytic::{
    greedy_best_response, symmetric_equilibria_two_process, EquilibriumKind, Verdict,
};
use poolgame_core::dist::{argmax_set_distribution, compare, Rates, DEFAULT_TOL};
use poolgame_core::game::{
    all_ordered_partitions, exact_payoff_tensor, exact_poisson_tensor, expected_payoff,
    mc_payoff_tensor, realized_payoffs, McTally, OrderedPartition, OutcomeDistribution,
    PureProfile,
};
use poolgame_core::solver::{
    best_response_dynamics, certify_regret, diversification_metric, find_symmetric_equilibrium,
    profile_regret, regret_descent, DEFAULT_TOL as SOLVER_TOL,
};
use poolgame_core::{MixedStrategy, ProcessSet};
use proptest::prelude::*;

fn rates(m: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    m.prop_flat_map(|m| prop::collection::vec(0.2f64..5.0, m))
}

fn simplex(m: usize) -> impl Strategy<Value = MixedStrategy> {
    prop::collection::vec(0.01f64..1.0, m).prop_map(|w| {
        let t: f64 = w.iter().sum();
        MixedStrategy::new(w.iter().map(|x| x / t).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn comparison_sums_to_one_and_swaps(a in 0.05f64..50.0, b in 0.05f64..50.0) {
        let ab = compare(a, b, DEFAULT_TOL).unwrap();
        let ba = compare(b, a, DEFAULT_TOL).unwrap();
        prop_assert!((ab.p_gt + ab.p_lt + ab.p_eq - 1.0).abs() <= 1e-12);
        prop_assert_eq!(ab.p_gt, ba.p_lt);
        prop_assert_eq!(ab.p_lt, ba.p_gt);
        prop_assert_eq!(ab.p_eq, ba.p_eq);
        prop_assert!(ab.odds_ratio > 0.0);
    }

    #[test]
    fn argmax_pairs_match_compare(a in 0.1f64..20.0, b in 0.1f64..20.0) {
        let r = Rates::new(vec![a, b]).unwrap();
        let dist = argmax_set_distribution(&r, ProcessSet::full(2), DEFAULT_TOL).unwrap();
        let c = compare(a, b, DEFAULT_TOL).unwrap();
        prop_assert!((dist[&ProcessSet::singleton(0)] - c.p_gt).abs() <= 1e-10);
        prop_assert!((dist[&ProcessSet::singleton(1)] - c.p_lt).abs() <= 1e-10);
        prop_assert!((dist[&ProcessSet::full(2)] - c.p_eq).abs() <= 1e-10);
    }

    #[test]
    fn argmax_distribution_is_normalized(r in rates(2..=6), mask in 1u32..64) {
        let m = r.len();
        let chosen = ProcessSet::from_bits(mask).intersection(ProcessSet::full(m));
        prop_assume!(!chosen.is_empty());
        let dist = argmax_set_distribution(&Rates::new(r).unwrap(), chosen, DEFAULT_TOL).unwrap();
        let total: f64 = dist.values().sum();
        prop_assert!((total - 1.0).abs() <= 10.0 * DEFAULT_TOL);
        prop_assert!(dist.keys().all(|s| s.is_subset(chosen)));
    }

    #[test]
    fn realized_payoffs_are_zero_sum(
        m in 2usize..=4,
        picks in prop::collection::vec(0usize..4, 2..=7),
        which in 0usize..1000,
    ) {
        let choices: Vec<usize> = picks.iter().map(|c| c % m).collect();
        let profile = PureProfile::new(m, choices).unwrap();
        let parts = all_ordered_partitions(m);
        let part = OrderedPartition::new(m, parts[which % parts.len()].clone()).unwrap();
        let pay = realized_payoffs(&profile, &part).unwrap();
        // n/w - 1 is rounded once per winner; the rational sum is exactly 0.
        let n = pay.len() as f64;
        prop_assert!(pay.iter().sum::<f64>().abs() <= 4.0 * n * f64::EPSILON);
        let winners = pay.iter().filter(|&&p| p > -1.0).count();
        if winners < pay.len() {
            let share = n / winners as f64 - 1.0;
            prop_assert!(pay.iter().all(|&p| p == -1.0 || p == share));
        } else {
            prop_assert!(pay.iter().all(|&p| p == 0.0));
        }
        prop_assert!(pay.iter().all(|&p| p >= -1.0));
    }

    #[test]
    fn realized_payoffs_follow_agents(
        picks in prop::collection::vec(0usize..3, 3..=6),
        seed in any::<u64>(),
        which in 0usize..13,
    ) {
        let m = 3;
        let profile = PureProfile::new(m, picks.clone()).unwrap();
        let part = OrderedPartition::new(m, all_ordered_partitions(m)[which].clone()).unwrap();
        let mut perm: Vec<usize> = (0..picks.len()).collect();
        // Fisher-Yates driven by the seed.
        let mut x = seed;
        for i in (1..perm.len()).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (x >> 33) as usize % (i + 1));
        }
        let permuted = PureProfile::new(m, perm.iter().map(|&i| picks[i]).collect()).unwrap();
        let a = realized_payoffs(&profile, &part).unwrap();
        let b = realized_payoffs(&permuted, &part).unwrap();
        for (k, &i) in perm.iter().enumerate() {
            prop_assert_eq!(b[k], a[i]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_tensor_is_zero_sum(r in rates(2..=4), n in 2usize..=6) {
        let t = exact_poisson_tensor(n, &Rates::new(r).unwrap(), DEFAULT_TOL).unwrap();
        for idx in 0..t.len() {
            let counts = t.counts(idx);
            let total: f64 = (0..t.m())
                .filter(|&j| counts[j] > 0)
                .map(|j| counts[j] as f64 * t.payoff_at(idx, j).unwrap())
                .sum();
            prop_assert!(total.abs() <= 1e-10);
            prop_assert!((0..t.m()).filter_map(|j| t.payoff_at(idx, j)).all(|p| p >= -1.0 - 1e-12));
        }
    }

    #[test]
    fn relabeling_processes_permutes_payoffs(r in rates(3..=3), n in 2usize..=5, rot in 1usize..3) {
        // Process j of the original game is process (j + rot) % 3 of the relabeled one.
        let m = 3;
        let mut relabeled = vec![0.0; m];
        for j in 0..m {
            relabeled[(j + rot) % m] = r[j];
        }
        let a = exact_poisson_tensor(n, &Rates::new(r).unwrap(), DEFAULT_TOL).unwrap();
        let b = exact_poisson_tensor(n, &Rates::new(relabeled).unwrap(), DEFAULT_TOL).unwrap();
        for idx in 0..a.len() {
            let counts = a.counts(idx);
            let mut moved = vec![0u32; m];
            for j in 0..m {
                moved[(j + rot) % m] = counts[j];
            }
            for j in (0..m).filter(|&j| counts[j] > 0) {
                let pa = a.payoff(counts, j).unwrap();
                let pb = b.payoff(&moved, (j + rot) % m).unwrap();
                prop_assert!((pa - pb).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn mixed_payoffs_follow_agents(
        r in rates(3..=3),
        strategies in prop::collection::vec(simplex(3), 4),
    ) {
        let t = exact_poisson_tensor(4, &Rates::new(r).unwrap(), DEFAULT_TOL).unwrap();
        let perm = [2usize, 0, 3, 1];
        let permuted: Vec<MixedStrategy> = perm.iter().map(|&i| strategies[i].clone()).collect();
        let total: f64 = (0..4).map(|i| expected_payoff(&strategies, &t, i).unwrap()).sum();
        prop_assert!(total.abs() <= 1e-10);
        for (k, &i) in perm.iter().enumerate() {
            let a = expected_payoff(&strategies, &t, i).unwrap();
            let b = expected_payoff(&permuted, &t, k).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn symmetric_profiles_pay_nothing(r in rates(2..=4), n in 2usize..=6, s in simplex(4)) {
        let m = r.len();
        let probs: Vec<f64> = s.probs()[..m].to_vec();
        let total: f64 = probs.iter().sum();
        let s = MixedStrategy::new(probs.iter().map(|p| p / total).collect()).unwrap();
        let t = exact_poisson_tensor(n, &Rates::new(r).unwrap(), DEFAULT_TOL).unwrap();
        let profile = vec![s; n];
        prop_assert!(expected_payoff(&profile, &t, 0).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn greedy_verdict_matches_tensor(r in rates(2..=3), n in 2usize..=6) {
        let rates = Rates::new(r.clone()).unwrap();
        let favorite = rates.argmax().iter().next().unwrap();
        let g = greedy_best_response(n, &rates, favorite).unwrap();
        let t = exact_poisson_tensor(n, &rates, DEFAULT_TOL).unwrap();
        let mut counts = vec![0u32; r.len()];
        counts[favorite] = n as u32 - 1;
        counts[g.deviant] += 1;
        let deviate = t.payoff(&counts, g.deviant).unwrap();
        // Staying with everyone else returns the stake.
        prop_assert!((deviate - (n - 1) as f64 * g.threshold_gap).abs() <= 1e-10);
        if g.threshold_gap.abs() > 1e-9 {
            match g.verdict {
                Verdict::UniquelyDeviate(j) => prop_assert!(deviate > 0.0 && j == g.deviant),
                Verdict::UniquelyFavorite => prop_assert!(deviate < 0.0),
                Verdict::Indifferent => prop_assert!(false, "gap {} is not a tie", g.threshold_gap),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn roots_are_equilibria_of_the_payoff_game(n in 3usize..=8, u in 0.0f64..1.0) {
        let d = (n - 1) as f64;
        // Log-uniform on the interior regime (1/(n-1), n-1).
        let c = (-d.ln() + u * 2.0 * d.ln()).exp();
        prop_assume!(c > 1.0 / d + 1e-9 && c < d - 1e-9);
        let eqs = symmetric_equilibria_two_process(n, c).unwrap();
        prop_assert!(!eqs.is_empty());
        let t = exact_payoff_tensor(n, &OutcomeDistribution::two_way(c / (1.0 + c)).unwrap()).unwrap();
        for e in eqs {
            prop_assert_eq!(e.kind, EquilibriumKind::Interior);
            prop_assert!(e.s1 > 0.0 && e.s1 < 1.0 && e.residual.abs() < 1e-9);
            let s = MixedStrategy::new(vec![e.s1, 1.0 - e.s1]).unwrap();
            let dev = t.symmetric_deviation_payoffs(&s).unwrap();
            prop_assert!((dev[0] - dev[1]).abs() < 1e-8, "n={n} c={c}: {dev:?}");
        }
    }

    #[test]
    fn swapping_labels_mirrors_the_equilibrium(n in 3usize..=8, u in 0.0f64..1.0) {
        let d = (n - 1) as f64;
        let c = (-d.ln() + u * 2.0 * d.ln()).exp();
        prop_assume!(c > 1.0 / d + 1e-9 && c < d - 1e-9);
        let a = symmetric_equilibria_two_process(n, c).unwrap();
        let b = symmetric_equilibria_two_process(n, 1.0 / c).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b.iter().rev()) {
            prop_assert!((x.s1 - (1.0 - y.s1)).abs() <= 1e-10);
        }
    }
}

#[test]
fn equilibrium_reaches_one_at_the_regime_boundary() {
    for n in 3..=8 {
        let d = (n - 1) as f64;
        let mut last_gap = f64::INFINITY;
        for eps in [1e-2, 1e-4, 1e-6] {
            let eqs = symmetric_equilibria_two_process(n, d - eps).unwrap();
            let top = eqs.iter().map(|e| e.s1).fold(0.0, f64::max);
            let gap = 1.0 - top;
            assert!(gap > 0.0 && gap < last_gap && gap <= 100.0 * eps, "n={n} eps={eps}: {gap}");
            last_gap = gap;
        }
        let pure = symmetric_equilibria_two_process(n, d).unwrap();
        assert_eq!(pure.len(), 1);
        assert_eq!(pure[0].s1, 1.0);
        assert_eq!(pure[0].kind, EquilibriumKind::PureFavorite);
    }
}

#[test]
fn comparison_grows_with_the_first_rate() {
    for &b in &[0.3, 1.0, 4.0, 25.0] {
        let mut last = -1.0;
        for i in 1..=60 {
            let a = 0.1 * i as f64 * (1.0 + b / 5.0);
            let p = compare(a, b, DEFAULT_TOL).unwrap().p_gt;
            assert!(p >= last, "a={a} b={b}");
            last = p;
        }
    }
}

#[test]
fn argmax_sets_agree_with_simulation() {
    // Binomial standard errors of each winning-set frequency.
    let cases: [&[f64]; 4] = [&[0.2, 5.0], &[1.3, 0.7, 2.2], &[4.1, 3.9, 0.5, 1.0], &[0.9, 0.9, 0.9]];
    for (k, r) in cases.iter().enumerate() {
        let rates = Rates::new(r.to_vec()).unwrap();
        let samples = 1_000_000u64;
        let table = McTally::sample_range(&rates, 11 + k as u64, 0, samples).unwrap().win_table();
        for chosen in ProcessSet::full(r.len()).subsets() {
            let exact = argmax_set_distribution(&rates, chosen, DEFAULT_TOL).unwrap();
            for (set, p) in exact {
                let freq = table
                    .winners(chosen)
                    .iter()
                    .find(|(w, _)| *w == set)
                    .map_or(0.0, |(_, f)| *f);
                let se = (p * (1.0 - p) / samples as f64).sqrt();
                assert!((freq - p).abs() <= 4.0 * se, "{r:?} {chosen:?} {set:?}: {freq} vs {p}");
            }
        }
    }
}

#[test]
fn simulated_tensors_agree_with_exact() {
    let cases: [(&[f64], usize); 6] = [
        (&[2.0, 1.0], 3),
        (&[1.25, 1.0], 5),
        (&[0.4, 2.5, 1.1], 4),
        (&[3.0, 0.8, 0.8], 2),
        (&[1.0, 0.95, 0.9, 0.85], 3),
        (&[4.5, 0.3, 2.0, 1.2], 5),
    ];
    for (k, (r, n)) in cases.iter().enumerate() {
        let rates = Rates::new(r.to_vec()).unwrap();
        let exact = exact_poisson_tensor(*n, &rates, DEFAULT_TOL).unwrap();
        let mc = mc_payoff_tensor(*n, &rates, 1_000_000, 100 + k as u64).unwrap();
        assert!(mc.has_stderr());
        for idx in 0..exact.len() {
            for j in 0..exact.m() {
                if let Some(p) = exact.payoff_at(idx, j) {
                    let q = mc.payoff_at(idx, j).unwrap();
                    let se = mc.stderr_at(idx, j).unwrap();
                    assert!((p - q).abs() <= 4.0 * se + 1e-12, "{r:?} n={n} {:?} j={j}", exact.counts(idx));
                }
            }
        }
    }
}

#[test]
fn simulation_is_reproducible() {
    let rates = Rates::new(vec![2.0, 1.0, 0.5]).unwrap();
    let a = mc_payoff_tensor(3, &rates, 20_000, 5).unwrap();
    let b = mc_payoff_tensor(3, &rates, 20_000, 5).unwrap();
    assert_eq!(a, b);
}

#[test]
fn certificates_agree_across_routes() {
    let cases: [(&[f64], usize); 4] = [
        (&[1.25, 1.0], 3),
        (&[1.0, 0.95, 0.9025], 4),
        (&[1.0, 0.65, 0.4225], 5),
        (&[2.0, 1.5, 1.0, 0.5], 3),
    ];
    for (r, n) in cases {
        let t = exact_poisson_tensor(n, &Rates::new(r.to_vec()).unwrap(), DEFAULT_TOL).unwrap();
        for seed in 0..4 {
            for res in [
                regret_descent(&t, seed, SOLVER_TOL).unwrap(),
                best_response_dynamics(&t, seed, SOLVER_TOL).unwrap(),
            ] {
                if !res.converged {
                    continue;
                }
                let brute = certify_regret(&res.profile, &t).unwrap();
                let dp = profile_regret(&res.profile, &t).unwrap();
                assert!((brute - res.regret).abs() <= 1e-9 && (dp - brute).abs() <= 1e-9);
                assert!(res.regret >= -1e-10 && res.regret < SOLVER_TOL);
            }
        }
    }
}

#[test]
fn symmetric_search_matches_closed_form() {
    let rate_pairs = [(1.25, 1.0), (2.0, 1.0), (1.0, 1.0), (0.7, 1.6), (3.0, 0.5)];
    for n in 3..=5 {
        for &(a, b) in &rate_pairs {
            let rates = Rates::new(vec![a, b]).unwrap();
            let c = compare(a, b, DEFAULT_TOL).unwrap().odds_ratio;
            let analytic = symmetric_equilibria_two_process(n, c).unwrap();
            assert_eq!(analytic.len(), 1);
            let t = exact_poisson_tensor(n, &rates, DEFAULT_TOL).unwrap();
            let found = find_symmetric_equilibrium(&t, 8, 3, SOLVER_TOL).unwrap();
            assert!(!found.results.is_empty());
            for res in &found.results {
                assert!(res.symmetric && res.regret < SOLVER_TOL);
                let s1 = res.profile[0].get(0);
                assert!((s1 - analytic[0].s1).abs() <= 1e-5, "n={n} ({a},{b}): {s1} vs {}", analytic[0].s1);
            }
        }
    }
}

#[test]
fn scaling_payoffs_keeps_the_equilibria() {
    let t = exact_poisson_tensor(3, &Rates::new(vec![1.0, 0.95, 0.9025]).unwrap(), DEFAULT_TOL).unwrap();
    for factor in [0.01, 7.5] {
        let scaled = t.scaled(factor);
        let a = find_symmetric_equilibrium(&t, 4, 9, SOLVER_TOL).unwrap();
        let b = find_symmetric_equilibrium(&scaled, 4, 9, SOLVER_TOL * factor).unwrap();
        assert_eq!(a.results.len(), b.results.len());
        for (x, y) in a.results.iter().zip(&b.results) {
            assert!(x.profile[0].linf_distance(&y.profile[0]) <= 1e-6);
        }
        for seed in 0..3 {
            for (x, y) in [
                (regret_descent(&t, seed, SOLVER_TOL).unwrap(), regret_descent(&scaled, seed, SOLVER_TOL * factor).unwrap()),
                (best_response_dynamics(&t, seed, SOLVER_TOL).unwrap(), best_response_dynamics(&scaled, seed, SOLVER_TOL * factor).unwrap()),
            ] {
                assert_eq!(x.converged, y.converged);
                for (p, q) in x.profile.iter().zip(&y.profile) {
                    assert!(p.linf_distance(q) <= 1e-6);
                }
            }
        }
    }
}

#[test]
fn ensembles_are_reproducible() {
    let t = exact_poisson_tensor(3, &Rates::new(vec![1.25, 1.0]).unwrap(), DEFAULT_TOL).unwrap();
    let a = diversification_metric(&t, 10, 42).unwrap();
    let b = diversification_metric(&t, 10, 42).unwrap();
    assert_eq!(a, b);
    assert!((a.avg_probs.iter().sum::<f64>() - 1.0).abs() <= 1e-8);
}
