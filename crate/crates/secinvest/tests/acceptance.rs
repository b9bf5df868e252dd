//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::time::{Duration, Instant};

use secinvest::checks::{
    count, degree_ordering_checks, enumerate_best_shot, existence_checks, exhaustiveness_checks,
    monte_carlo_agreement, payoff_checks, refinement_checks, solve_interaction_suite, Status,
};
use secinvest::experiments::{self, expost_comparison};
use secinvest::suite::Correlation;
use secinvest::ExperimentConfig;
use secinvest_core::{
    empirical_beliefs, sample_graph, solve_symmetric_bne, ActionGrid, AssortativityTarget, BenefitFunction,
    CostFunction, DegreeDistribution, Game, NeighborBeliefs, PayoffModel, SolverConfig, StrategyProfile,
};

const SEED: u64 = 0x5ec1_2e57;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn timed(limit: Duration, f: impl FnOnce() -> Verdict) -> Verdict {
    let t = Instant::now();
    let v = f();
    let took = t.elapsed();
    verdict(v.ok && took <= limit, format!("{} [{:.2?} of {:?}]", v.detail, took, limit))
}

/// Indifference oracle: investing pays `1 - c` for sure; free riding pays
/// `1 - (1 - p)^d`. Setting them equal gives `p = 1 - c^(1/d)`.
fn indifference(c: f64, d: usize) -> f64 {
    let p = 1.0 - c.powf(1.0 / d as f64);
    let invest = 1.0 - c;
    let ride = 1.0 - (1.0 - p).powi(d as i32);
    assert!((invest - ride).abs() < 1e-12);
    p
}

fn best_shot_closed_form() -> Verdict {
    timed(Duration::from_secs(10), || {
        let mut worst: f64 = 0.0;
        let mut all_converged = true;
        for c in [0.1, 0.25, 0.5, 0.75] {
            for d in 1..=4 {
                let model = PayoffModel::best_shot(CostFunction::Linear { c0: c }).unwrap();
                let game = Game::new(model, NeighborBeliefs::regular(d).unwrap(), ActionGrid::binary()).unwrap();
                let start = StrategyProfile::binary(&[(d, 0.5)]).unwrap();
                let rep = solve_symmetric_bne(&game, &SolverConfig::default(), &start).unwrap();
                all_converged &= rep.converged;
                worst = worst.max((rep.actions[0] - indifference(c, d)).abs());
            }
        }
        verdict(all_converged && worst <= 0.01, format!("16 cases, max |p - p*| = {worst:.2e}"))
    })
}

fn degree_ordering() -> Verdict {
    timed(Duration::from_secs(120), || {
        let rows = degree_ordering_checks(60, SEED).unwrap();
        let (pass, fail) = (count(&rows, Status::Pass), count(&rows, Status::Fail));
        verdict(pass >= 50 && fail == 0, format!("{pass} instances checked, {fail} counterexamples"))
    })
}

fn suite_existence() -> (Verdict, Vec<secinvest::checks::SolvedInstance>) {
    let solved = solve_interaction_suite(21, &SolverConfig::default(), 2, SEED).unwrap();
    let rows = existence_checks(&solved, 1e-9);
    let fail: Vec<_> = rows.iter().filter(|r| r.status != Status::Pass).map(|r| r.instance.clone()).collect();
    let starts = solved.iter().map(|s| s.reports.len()).sum::<usize>();
    (
        verdict(fail.is_empty(), format!("{} instances, {starts} solves, failing: {fail:?}", rows.len())),
        solved,
    )
}

type Enumerated = Vec<(String, secinvest_core::AssociationVerdict, Vec<secinvest_core::EquilibriumReport>)>;

fn best_shot_exhaustive() -> (Verdict, Enumerated) {
    let found = enumerate_best_shot(24, 3, 11, SEED).unwrap();
    let rows = exhaustiveness_checks(&found);
    let fail = count(&rows, Status::Fail);
    let direction = rows.last().unwrap().detail.clone();
    let total: usize = found.iter().map(|f| f.2.len()).sum();
    (
        verdict(fail == 0, format!("{} games, {total} equilibria, direction {direction}", found.len())),
        found,
    )
}

fn headline(solved: &[secinvest::checks::SolvedInstance], enumerated: &Enumerated) -> Verdict {
    let subs: Vec<_> = solved.iter().filter(|s| s.interaction.is_substitutes()).collect();
    let groups = subs
        .iter()
        .map(|s| (s.name.as_str(), s.association, s.reports.as_slice()))
        .chain(enumerated.iter().map(|(n, a, r)| (n.as_str(), *a, r.as_slice())));
    let rows = payoff_checks(groups);
    let fail = count(&rows, Status::Fail);
    let covered = Correlation::ALL.iter().all(|c| {
        subs.iter().any(|s| {
            s.correlation == *c
                && rows.iter().any(|r| r.check == "headline" && r.instance == s.name && r.status == Status::Pass)
        })
    });
    let checked = rows.iter().filter(|r| r.check == "headline").count();
    verdict(
        fail == 0 && covered,
        format!("{checked} equilibrium sets, {fail} failures, all three correlation families covered: {covered}"),
    )
}

fn cross_validation() -> Verdict {
    let (hits, cells) = monte_carlo_agreement(1000, 2000, SEED).unwrap();
    let law = DegreeDistribution::new(vec![0.0, 0.3, 0.3, 0.25, 0.15]).unwrap();
    let target = AssortativityTarget {
        law,
        r_target: 0.0,
        rewiring_budget: 100_000,
    };
    let g = sample_graph(&target, 500, SEED).unwrap();
    let model =
        PayoffModel::sum_of_investments(BenefitFunction::Power { alpha: 0.5 }, CostFunction::Linear { c0: 0.8 }, 1.0)
            .unwrap();
    let game = Game::new(model, empirical_beliefs(&g).unwrap(), ActionGrid::uniform(11).unwrap()).unwrap();
    let (_, rows) = expost_comparison(&game, &g, &SolverConfig::default(), 200, SEED).unwrap();
    let agree = rows.iter().filter(|r| r.agrees(4.0)).count();
    let mc_ok = hits * 100 >= cells * 99;
    let ex_ok = agree * 100 >= rows.len() * 95;
    verdict(
        mc_ok && ex_ok,
        format!("Monte Carlo {hits}/{cells} within 4 SE; ex-post {agree}/{} degree classes within 4 SE", rows.len()),
    )
}

fn refinement() -> Verdict {
    let rows = refinement_checks(&[11, 21, 41], &SolverConfig::default()).unwrap();
    let fail: Vec<_> = rows.iter().filter(|r| r.status != Status::Pass).map(|r| format!("{}: {}", r.instance, r.detail)).collect();
    verdict(fail.is_empty(), format!("{} comparisons, failing: {fail:?}", rows.len()))
}

const DETERMINISM_CONFIGS: [&str; 3] = [
    r#"
experiment = "lemma-suite"
seed = 11
[suite]
ordering_instances = 8
best_shot_instances = 6
resolution = 11
"#,
    r#"
experiment = "expost-validate"
seed = 12
[payoff]
game = "sum-of-investments"
benefit = "log"
c0 = 0.6
lambda = 0.7
[graph]
degree_law = [0.0, 0.4, 0.3, 0.3]
n = 200
r_target = -0.2
[grid]
resolution = 11
[expost]
trials = 50
"#,
    r#"
experiment = "association-audit"
seed = 13
[beliefs]
kind = "graph"
[graph]
degree_law = [0.0, 0.3, 0.3, 0.4]
n = 300
r_target = 0.3
[association]
m = 2
"#,
];

fn determinism() -> Verdict {
    let mut identical = 0;
    for text in DETERMINISM_CONFIGS {
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        let a = experiments::run(&cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| experiments::run(&cfg)).unwrap();
        if a.artifacts == b.artifacts && a.summary == b.summary {
            identical += 1;
        }
    }
    verdict(
        identical == DETERMINISM_CONFIGS.len(),
        format!("{identical}/{} experiments byte-identical across reruns and worker counts", DETERMINISM_CONFIGS.len()),
    )
}

fn main() {
    let mut results = Vec::new();
    results.push(("best-shot closed form", best_shot_closed_form()));
    results.push(("degree ordering counterexample search", degree_ordering()));
    let (v, solved) = suite_existence();
    results.push(("existence and direction on the interaction suite", v));
    let (v, enumerated) = best_shot_exhaustive();
    results.push(("best-shot exhaustive enumeration", v));
    results.push(("payoff ordering and headline under substitutes", headline(&solved, &enumerated)));
    results.push(("Monte Carlo and ex-post cross-validation", cross_validation()));
    results.push(("grid refinement", refinement()));
    results.push(("determinism", determinism()));

    let mut failed = 0;
    for (i, (name, v)) in results.iter().enumerate() {
        println!("criterion {}: {} {name}: {}", i + 1, if v.ok { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.ok);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
