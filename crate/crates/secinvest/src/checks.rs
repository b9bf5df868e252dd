//! Property checks run by `lemma-suite` and the acceptance tests.
//!
//! Every check yields [`CheckRow`]s; a failed property is a `Fail` row, not
//! an error. Errors are reserved for invalid input and exhausted budgets.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use secinvest_core::equilibrium::{verify_headline, verify_payoff_ordering};
use secinvest_core::expected_utility::check_degree_complementarity;
use secinvest_core::payoff::{check_link_dropping, StrategicInteraction};
use secinvest_core::seed::{derive_seed, rng_from_seed};
use secinvest_core::{
    enumerate_symmetric_equilibria, solve_symmetric_bne, AssociationVerdict, EquilibriumReport, Game,
    Monotonicity, SolverConfig,
};

use crate::suite::{
    audit_association, best_shot_independent, interaction_suite, ordering_instances,
    starting_profiles, Correlation,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub check: &'static str,
    pub instance: String,
    pub status: Status,
    pub detail: String,
}

impl CheckRow {
    fn new(check: &'static str, instance: impl Into<String>, status: Status, detail: impl Into<String>) -> Self {
        CheckRow {
            check,
            instance: instance.into(),
            status,
            detail: detail.into(),
        }
    }
}

pub fn count(rows: &[CheckRow], status: Status) -> usize {
    rows.iter().filter(|r| r.status == status).count()
}

/// Degree-ordering check on `count` generated instances whose hypotheses
/// hold (link dropping, exhaustive interaction class, association audit).
pub fn degree_ordering_checks(count: usize, seed: u64) -> secinvest_core::Result<Vec<CheckRow>> {
    let instances = ordering_instances(count, derive_seed(seed, "ordering", 0));
    instances
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            let name = format!("ordering-{i}");
            if let Some((own, nbrs)) = check_link_dropping(&inst.game.model, 3, &inst.game.grid)? {
                return Ok(CheckRow::new(
                    "degree-ordering",
                    name,
                    Status::Skip,
                    format!("link dropping fails at own={own} neighbors={nbrs:?}"),
                ));
            }
            let rep = check_degree_complementarity(&inst.game, &inst.profile, &[1, 2, 3])?;
            let result = if inst.interaction.is_complements() {
                &rep.complements
            } else {
                &rep.substitutes
            };
            let row = match result {
                Some(Ok(())) => CheckRow::new(
                    "degree-ordering",
                    name,
                    Status::Pass,
                    format!("{} / {}", inst.interaction.as_str(), inst.association.as_str()),
                ),
                Some(Err(w)) => CheckRow::new(
                    "degree-ordering",
                    name,
                    Status::Fail,
                    format!(
                        "degrees {}>{} actions {}>{}: gains {} vs {}",
                        w.high_degree, w.low_degree, w.high_action, w.low_action, w.gain_at_high_degree, w.gain_at_low_degree
                    ),
                ),
                None => CheckRow::new("degree-ordering", name, Status::Skip, "profile shape does not fit the test"),
            };
            Ok(row)
        })
        .collect()
}

/// One suite instance solved from every starting profile.
#[derive(Debug, Clone)]
pub struct SolvedInstance {
    pub name: String,
    pub interaction: StrategicInteraction,
    pub correlation: Correlation,
    pub association: AssociationVerdict,
    pub starts: Vec<String>,
    pub reports: Vec<EquilibriumReport>,
}

pub fn solve_interaction_suite(
    resolution: usize,
    config: &SolverConfig,
    random_starts: usize,
    seed: u64,
) -> secinvest_core::Result<Vec<SolvedInstance>> {
    interaction_suite(resolution)
        .into_par_iter()
        .enumerate()
        .map(|(i, inst)| {
            let association = audit_association(&inst.game.beliefs, derive_seed(seed, "suite-audit", i as u64))?;
            let mut starts = Vec::new();
            let mut reports = Vec::new();
            for (label, start) in starting_profiles(&inst.game, random_starts, derive_seed(seed, "suite-start", i as u64)) {
                reports.push(solve_symmetric_bne(&inst.game, config, &start)?);
                starts.push(label);
            }
            Ok(SolvedInstance {
                name: inst.name,
                interaction: inst.interaction,
                correlation: inst.correlation,
                association,
                starts,
                reports,
            })
        })
        .collect()
}

fn expected_direction(interaction: StrategicInteraction) -> fn(Monotonicity) -> bool {
    if interaction.is_substitutes() {
        Monotonicity::is_non_increasing
    } else {
        Monotonicity::is_non_decreasing
    }
}

/// Every start converges, and at least one equilibrium has the monotone
/// direction the interaction class predicts.
pub fn existence_checks(solved: &[SolvedInstance], eps: f64) -> Vec<CheckRow> {
    solved
        .iter()
        .map(|s| {
            let worst = s.reports.iter().map(|r| r.residual).fold(0.0, f64::max);
            let all_converged = s.reports.iter().all(|r| r.converged && r.residual <= eps);
            let fits = expected_direction(s.interaction);
            let matching = s.reports.iter().filter(|r| fits(r.monotonicity)).count();
            let shapes: Vec<&str> = s.reports.iter().map(|r| r.monotonicity.as_str()).collect();
            CheckRow::new(
                "existence-direction",
                s.name.clone(),
                Status::from_bool(all_converged && matching > 0),
                format!("max residual {worst:e}; {matching}/{} match; shapes {shapes:?}", s.reports.len()),
            )
        })
        .collect()
}

/// Exhaustive enumeration on best-shot games with independent degrees.
pub fn enumerate_best_shot(
    count: usize,
    max_degree: usize,
    levels: usize,
    seed: u64,
) -> secinvest_core::Result<Vec<(String, AssociationVerdict, Vec<EquilibriumReport>)>> {
    let config = SolverConfig {
        mixing_levels: levels,
        ..SolverConfig::default()
    };
    best_shot_independent(count, max_degree, derive_seed(seed, "best-shot", 0))
        .into_par_iter()
        .enumerate()
        .map(|(i, game)| {
            let verdict = audit_association(&game.beliefs, derive_seed(seed, "best-shot-audit", i as u64))?;
            Ok((format!("best-shot-{i}"), verdict, enumerate_symmetric_equilibria(&game, &config)?))
        })
        .collect()
}

/// Every enumerated equilibrium is monotone, and no two instances disagree
/// on the direction. A game with no equilibrium on the mixing grid is a skip.
pub fn exhaustiveness_checks(enumerated: &[(String, AssociationVerdict, Vec<EquilibriumReport>)]) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let (mut up, mut down, mut flat) = (0usize, 0usize, 0usize);
    for (name, _, reports) in enumerated {
        let shapes: Vec<Monotonicity> = reports.iter().map(|r| r.monotonicity).collect();
        for s in &shapes {
            match s {
                Monotonicity::NonDecreasing => up += 1,
                Monotonicity::NonIncreasing => down += 1,
                Monotonicity::Constant => flat += 1,
                Monotonicity::NonMonotone => {}
            }
        }
        let monotone = shapes.iter().all(|&s| s != Monotonicity::NonMonotone);
        rows.push(if reports.is_empty() {
            CheckRow::new("exhaustive-monotone", name.clone(), Status::Skip, "no equilibrium on this mixing grid")
        } else {
            CheckRow::new(
                "exhaustive-monotone",
                name.clone(),
                Status::from_bool(monotone),
                format!("{} equilibria: {:?}", reports.len(), shapes.iter().map(|s| s.as_str()).collect::<Vec<_>>()),
            )
        });
    }
    let direction = match (up, down) {
        (0, 0) => "constant only",
        (_, 0) => "non-decreasing",
        (0, _) => "non-increasing",
        _ => "mixed",
    };
    rows.push(CheckRow::new(
        "exhaustive-direction",
        "all",
        Status::from_bool((up == 0 || down == 0) && up + down + flat > 0),
        format!("{direction} ({down} non-increasing, {up} non-decreasing, {flat} constant)"),
    ));
    rows
}

/// Payoff ordering and the headline claim on every substitutes equilibrium.
pub fn payoff_checks<'a>(
    groups: impl IntoIterator<Item = (&'a str, AssociationVerdict, &'a [EquilibriumReport])>,
) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    for (name, association, reports) in groups {
        let po = verify_payoff_ordering(reports, association);
        rows.push(if po.checked == 0 {
            CheckRow::new(
                "payoff-ordering",
                name,
                Status::Skip,
                format!("{} skipped ({})", po.skipped.len(), association.as_str()),
            )
        } else {
            CheckRow::new(
                "payoff-ordering",
                name,
                Status::from_bool(po.holds()),
                format!("{} checked, {} failures ({})", po.checked, po.failures.len(), association.as_str()),
            )
        });
        if reports.is_empty() {
            rows.push(CheckRow::new("headline", name, Status::Skip, "no equilibria"));
            continue;
        }
        let h = verify_headline(reports);
        rows.push(CheckRow::new(
            "headline",
            name,
            Status::from_bool(h.holds()),
            format!(
                "{} checked, {} action failures, {} payoff failures",
                h.checked,
                h.action_failures.len(),
                h.payoff_failures.len()
            ),
        ));
    }
    rows
}

/// Largest change in equilibrium action (from the all-zero start) between
/// successive resolutions, against the coarser grid step.
pub fn refinement_checks(resolutions: &[usize], config: &SolverConfig) -> secinvest_core::Result<Vec<CheckRow>> {
    let per_res = resolutions
        .par_iter()
        .map(|&r| {
            interaction_suite(r)
                .into_iter()
                .map(|inst| {
                    let start = starting_profiles(&inst.game, 0, 0).swap_remove(0).1;
                    let rep = solve_symmetric_bne(&inst.game, config, &start)?;
                    Ok((inst.name, rep))
                })
                .collect::<secinvest_core::Result<Vec<_>>>()
        })
        .collect::<secinvest_core::Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for w in 0..resolutions.len().saturating_sub(1) {
        let step = 1.0 / (resolutions[w] - 1) as f64;
        for ((name, a), (_, b)) in per_res[w].iter().zip(&per_res[w + 1]) {
            let diff = a.actions.iter().zip(&b.actions).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            rows.push(CheckRow::new(
                "refinement",
                format!("{name} {}->{}", resolutions[w], resolutions[w + 1]),
                Status::from_bool(a.converged && b.converged && diff <= step + 1e-12),
                format!("max difference {diff:.6} vs step {step:.6}"),
            ));
        }
    }
    Ok(rows)
}

/// Monte Carlo against exact EU on random cells drawn from the suite games.
/// Returns `(within 4 standard errors, total)`.
pub fn monte_carlo_agreement(cells: usize, samples: usize, seed: u64) -> secinvest_core::Result<(usize, usize)> {
    let games: Vec<Game> = interaction_suite(11)
        .into_iter()
        .map(|s| s.game)
        .chain(best_shot_independent(6, 3, derive_seed(seed, "mc-best-shot", 0)))
        .collect();
    let hits = (0..cells as u64)
        .into_par_iter()
        .map(|c| {
            let mut r = rng_from_seed(derive_seed(seed, "mc-cell", c));
            let game = &games[r.gen_range(0..games.len())];
            let start = starting_profiles(game, 1, r.gen()).pop().unwrap().1;
            let d = game.degrees()[r.gen_range(0..game.degrees().len())];
            let x = game.grid.point(r.gen_range(0..game.grid.len()));
            let exact = game.expected_utility_exact(&start, d, x)?;
            let mc = game.expected_utility_mc(&start, d, x, samples, derive_seed(seed, "mc-sample", c))?;
            let ok = if mc.std_error == 0.0 {
                (mc.estimate - exact).abs() <= 1e-12
            } else {
                (mc.estimate - exact).abs() <= 4.0 * mc.std_error
            };
            Ok(usize::from(ok))
        })
        .collect::<secinvest_core::Result<Vec<_>>>()?;
    Ok((hits.iter().sum(), cells))
}

/// The full suite behind the `lemma-suite` experiment.
pub struct SuiteParams {
    pub ordering_instances: usize,
    pub best_shot_instances: usize,
    pub resolution: usize,
    pub solver: SolverConfig,
    pub random_starts: usize,
    pub seed: u64,
}

pub fn run_suite(p: &SuiteParams) -> secinvest_core::Result<Vec<CheckRow>> {
    let mut rows = degree_ordering_checks(p.ordering_instances, p.seed)?;
    let solved = solve_interaction_suite(p.resolution, &p.solver, p.random_starts, p.seed)?;
    rows.extend(existence_checks(&solved, p.solver.eps_fix));
    let enumerated = enumerate_best_shot(p.best_shot_instances, 3, 11, p.seed)?;
    rows.extend(exhaustiveness_checks(&enumerated));
    let substitutes = solved
        .iter()
        .filter(|s| s.interaction.is_substitutes())
        .map(|s| (s.name.as_str(), s.association, s.reports.as_slice()))
        .chain(enumerated.iter().map(|(n, a, r)| (n.as_str(), *a, r.as_slice())));
    rows.extend(payoff_checks(substitutes));
    Ok(rows)
}
