//! Experiment pipelines. Each computes every artifact in memory; nothing is
//! written until the whole run has succeeded.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::{json, Value};

use secinvest_core::graph_sim::{expost_trial, summarize_expost};
use secinvest_core::payoff::classify_strategic_interaction;
use secinvest_core::seed::derive_seed;
use secinvest_core::{
    check_association, empirical_beliefs, enumerate_symmetric_equilibria, generate_monotone_test_functions,
    sample_graph, solve_symmetric_bne, AssociationTest, CostFunction, EquilibriumReport, Game, GameKind,
    GraphInstance, NeighborBeliefs, StrategyProfile,
};

use crate::checks::{self, CheckRow, Status, SuiteParams};
use crate::config::{BeliefSpec, ExperimentConfig, ExperimentKind};
use crate::error::AppError;
use crate::records::{edge_list, num, Artifact, Table};
use crate::suite::starting_profiles;

/// Everything a run produces. `artifacts[0]` is the primary table.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub artifacts: Vec<Artifact>,
    pub summary: String,
    pub seeds: BTreeMap<String, u64>,
}

impl RunOutput {
    pub fn primary(&self) -> &Artifact {
        &self.artifacts[0]
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput, AppError> {
    cfg.validate()?;
    let mut seeds = BTreeMap::new();
    seeds.insert("root".to_string(), cfg.seed);
    let mut out = match cfg.experiment {
        ExperimentKind::Solve => solve(cfg, &mut seeds)?,
        ExperimentKind::Enumerate => enumerate(cfg, &mut seeds)?,
        ExperimentKind::AssociationAudit => association_audit(cfg, &mut seeds)?,
        ExperimentKind::LemmaSuite => lemma_suite(cfg, &mut seeds)?,
        ExperimentKind::ExpostValidate => expost_validate(cfg, &mut seeds)?,
    };
    out.seeds = seeds;
    Ok(out)
}

fn sample(cfg: &ExperimentConfig, seeds: &mut BTreeMap<String, u64>) -> Result<GraphInstance, AppError> {
    let seed = derive_seed(cfg.seed, "graph", 0);
    seeds.insert("graph".into(), seed);
    let n = cfg.graph.as_ref().expect("validated").n;
    Ok(sample_graph(&cfg.graph_target()?, n, seed)?)
}

/// Beliefs from the config, sampling the graph first if they come from one.
fn beliefs(
    cfg: &ExperimentConfig,
    seeds: &mut BTreeMap<String, u64>,
) -> Result<(NeighborBeliefs, Option<GraphInstance>), AppError> {
    match cfg.beliefs {
        Some(BeliefSpec::Graph) => {
            let g = sample(cfg, seeds)?;
            Ok((empirical_beliefs(&g)?, Some(g)))
        }
        _ => Ok((cfg.explicit_beliefs()?, None)),
    }
}

fn game(cfg: &ExperimentConfig, beliefs: NeighborBeliefs) -> Result<Game, AppError> {
    Ok(Game::new(cfg.model()?, beliefs, cfg.grid()?)?.with_budget(cfg.solver.budget))
}

fn starts(cfg: &ExperimentConfig, game: &Game, seeds: &mut BTreeMap<String, u64>) -> Vec<(String, StrategyProfile)> {
    let seed = derive_seed(cfg.seed, "start", 0);
    seeds.insert("start".into(), seed);
    starting_profiles(game, cfg.solver.random_starts, seed)
        .into_iter()
        .filter(|(label, _)| label.starts_with("random-") || cfg.solver.starts.iter().any(|s| s == label))
        .collect()
}

const EQUILIBRIUM_HEADER: [&str; 12] = [
    "label", "degree", "action", "eu_star", "best_response", "shape", "eu_shape", "method", "converged",
    "iterations", "residual", "law",
];

fn equilibrium_rows(table: &mut Table, label: &str, rep: &EquilibriumReport) {
    for (i, &d) in rep.degrees.iter().enumerate() {
        let law = rep.profile.law(d).expect("degree in profile");
        let law = law.iter().map(|p| num(*p)).collect::<Vec<_>>().join(" ");
        table.row([
            label.to_string(),
            d.to_string(),
            num(rep.actions[i]),
            num(rep.eu_star[i]),
            num(rep.best_response[i]),
            rep.monotonicity.as_str().to_string(),
            rep.eu_monotonicity.as_str().to_string(),
            rep.method.as_str().to_string(),
            rep.converged.to_string(),
            rep.iterations.to_string(),
            num(rep.residual),
            law,
        ]);
    }
}

fn equilibrium_json(label: &str, rep: &EquilibriumReport) -> Value {
    json!({
        "label": label,
        "degrees": rep.degrees,
        "actions": rep.actions,
        "eu_star": rep.eu_star,
        "best_response": rep.best_response,
        "shape": rep.monotonicity.as_str(),
        "eu_shape": rep.eu_monotonicity.as_str(),
        "method": rep.method.as_str(),
        "converged": rep.converged,
        "iterations": rep.iterations,
        "residual": rep.residual,
    })
}

/// `1 - c0^(1/d)`: the mixing probability that leaves a best-shot player
/// with `d` regular neighbors and linear cost indifferent.
fn indifference_probability(game: &Game) -> Option<Vec<(usize, f64)>> {
    if game.model.kind != GameKind::BestShot {
        return None;
    }
    let CostFunction::Linear { c0 } = game.model.cost else { return None };
    let regular = game.degrees().iter().all(|&d| game.beliefs.neighbor_support(d) == Some(vec![d]));
    regular.then(|| game.degrees().iter().map(|&d| (d, 1.0 - c0.powf(1.0 / d as f64))).collect())
}

fn describe(game: &Game) -> Value {
    let interaction = classify_strategic_interaction(&game.model, game.beliefs.max_degree().min(3), &game.grid);
    json!({
        "game": game.model.kind.as_str(),
        "benefit": game.model.benefit.family(),
        "cost": game.model.cost.family(),
        "c0": game.model.cost.c0(),
        "lambda": game.model.lambda,
        "grid_points": game.grid.len(),
        "beliefs": game.beliefs.kind().as_str(),
        "own_degrees": game.degrees(),
        "interaction": interaction.class.as_str(),
    })
}

fn report_artifact(value: &Value) -> Artifact {
    let mut bytes = serde_json::to_vec_pretty(value).expect("json");
    bytes.push(b'\n');
    Artifact {
        name: "report.json".into(),
        bytes,
    }
}

fn eu_table(game: &Game, reports: &[(String, EquilibriumReport)]) -> Result<Artifact, AppError> {
    let mut t = Table::new(&["label", "degree", "action", "eu"]);
    for (label, rep) in reports {
        for cell in game.table_exact(&rep.profile)?.cells {
            t.row([label.clone(), cell.degree.to_string(), num(cell.action), num(cell.value)]);
        }
    }
    Ok(t.finish("eu_table.csv"))
}

fn solve(cfg: &ExperimentConfig, seeds: &mut BTreeMap<String, u64>) -> Result<RunOutput, AppError> {
    let (beliefs, graph) = beliefs(cfg, seeds)?;
    let game = game(cfg, beliefs)?;
    let solver = cfg.solver_config()?;
    let starts = starts(cfg, &game, seeds);
    let reports = starts
        .par_iter()
        .map(|(label, s)| Ok((label.clone(), solve_symmetric_bne(&game, &solver, s)?)))
        .collect::<Result<Vec<_>, AppError>>()?;

    let mut eq = Table::new(&EQUILIBRIUM_HEADER);
    for (label, rep) in &reports {
        equilibrium_rows(&mut eq, label, rep);
    }
    let oracle = indifference_probability(&game);
    let mut summary = format!(
        "solve: {} game, {} beliefs, {} grid points, {} starts\n",
        game.model.kind.as_str(),
        game.beliefs.kind().as_str(),
        game.grid.len(),
        reports.len()
    );
    for (label, rep) in &reports {
        summary.push_str(&format!(
            "start {label}: converged={} iterations={} residual={:e} shape={} eu_shape={}\n",
            rep.converged,
            rep.iterations,
            rep.residual,
            rep.monotonicity.as_str(),
            rep.eu_monotonicity.as_str()
        ));
        for (i, &d) in rep.degrees.iter().enumerate() {
            if game.grid.is_binary() {
                summary.push_str(&format!("  d={d} p*={:.6} eu*={:.6}", rep.actions[i], rep.eu_star[i]));
            } else {
                summary.push_str(&format!("  d={d} x*={:.6} eu*={:.6}", rep.actions[i], rep.eu_star[i]));
            }
            if let Some(o) = oracle.as_ref().and_then(|o| o.iter().find(|(k, _)| *k == d)) {
                summary.push_str(&format!(" indifference={:.6}", o.1));
            }
            summary.push('\n');
        }
    }
    let mut report = json!({
        "experiment": "solve",
        "instance": describe(&game),
        "equilibria": reports.iter().map(|(l, r)| equilibrium_json(l, r)).collect::<Vec<_>>(),
    });
    if let Some(o) = &oracle {
        report["indifference_probability"] = json!(o);
    }
    let mut artifacts = vec![eq.finish("equilibria.csv"), eu_table(&game, &reports)?];
    if let Some(g) = &graph {
        artifacts.push(edge_list(g));
        report["graph"] = graph_json(g);
    }
    artifacts.push(report_artifact(&report));
    Ok(RunOutput {
        artifacts,
        summary,
        seeds: BTreeMap::new(),
    })
}

fn graph_json(g: &GraphInstance) -> Value {
    let m = &g.meta;
    json!({
        "n": g.n(),
        "edges": g.edge_count(),
        "target_r": m.target_r,
        "initial_r": m.initial_r,
        "achieved_r": m.achieved_r,
        "degenerate": m.degenerate,
        "rewiring_attempts": m.rewiring_attempts,
        "rewiring_accepted": m.rewiring_accepted,
        "budget_exhausted": m.budget_exhausted,
    })
}

fn enumerate(cfg: &ExperimentConfig, seeds: &mut BTreeMap<String, u64>) -> Result<RunOutput, AppError> {
    let (beliefs, graph) = beliefs(cfg, seeds)?;
    let game = game(cfg, beliefs)?;
    let found = enumerate_symmetric_equilibria(&game, &cfg.solver_config()?)?;
    let labelled: Vec<(String, EquilibriumReport)> =
        found.into_iter().enumerate().map(|(i, r)| (format!("eq-{i}"), r)).collect();
    let mut eq = Table::new(&EQUILIBRIUM_HEADER);
    for (label, rep) in &labelled {
        equilibrium_rows(&mut eq, label, rep);
    }
    let mut summary = format!(
        "enumerate: {} game, {} grid points, {} equilibria\n",
        game.model.kind.as_str(),
        game.grid.len(),
        labelled.len()
    );
    for (label, rep) in &labelled {
        summary.push_str(&format!(
            "{label}: actions {:?} shape={} eu_shape={}\n",
            rep.actions,
            rep.monotonicity.as_str(),
            rep.eu_monotonicity.as_str()
        ));
    }
    let mut report = json!({
        "experiment": "enumerate",
        "instance": describe(&game),
        "equilibria": labelled.iter().map(|(l, r)| equilibrium_json(l, r)).collect::<Vec<_>>(),
    });
    let mut artifacts = vec![eq.finish("equilibria.csv"), eu_table(&game, &labelled)?];
    if let Some(g) = &graph {
        artifacts.push(edge_list(g));
        report["graph"] = graph_json(g);
    }
    artifacts.push(report_artifact(&report));
    Ok(RunOutput {
        artifacts,
        summary,
        seeds: BTreeMap::new(),
    })
}

fn association_audit(cfg: &ExperimentConfig, seeds: &mut BTreeMap<String, u64>) -> Result<RunOutput, AppError> {
    let (beliefs, graph) = beliefs(cfg, seeds)?;
    let seed = derive_seed(cfg.seed, "association", 0);
    seeds.insert("association".into(), seed);
    let m = cfg.association.m;
    let fs = generate_monotone_test_functions(beliefs.max_degree(), m, cfg.association.functions, seed)?;
    let test = AssociationTest::all_pairs(&beliefs, m, fs)?;
    let rep = check_association(&beliefs, &test)?;
    let mut t = Table::new(&[
        "lower_degree",
        "higher_degree",
        "function",
        "expectation_lower",
        "expectation_higher",
        "difference",
        "verdict",
    ]);
    for r in &rep.rows {
        t.row([
            r.lower_degree.to_string(),
            r.higher_degree.to_string(),
            r.function.to_string(),
            num(r.expectation_lower),
            num(r.expectation_higher),
            num(r.difference),
            r.verdict.as_str().to_string(),
        ]);
    }
    let witness = |i: Option<usize>| {
        i.map(|i| {
            let r = &rep.rows[i];
            json!({"lower_degree": r.lower_degree, "higher_degree": r.higher_degree, "function": r.function, "difference": r.difference})
        })
    };
    let mut report = json!({
        "experiment": "association-audit",
        "beliefs": beliefs.kind().as_str(),
        "m": m,
        "functions": test.functions().len(),
        "pairs": test.pairs().len(),
        "verdict": rep.verdict.as_str(),
        "positive_witness": witness(rep.positive_witness),
        "negative_witness": witness(rep.negative_witness),
    });
    let summary = format!(
        "association-audit: {} pairs x {} functions, m={m}: {}\n",
        test.pairs().len(),
        test.functions().len(),
        rep.verdict.as_str()
    );
    let mut artifacts = vec![t.finish("association.csv")];
    if let Some(g) = &graph {
        artifacts.push(edge_list(g));
        report["graph"] = graph_json(g);
    }
    artifacts.push(report_artifact(&report));
    Ok(RunOutput {
        artifacts,
        summary,
        seeds: BTreeMap::new(),
    })
}

fn check_table(rows: &[CheckRow]) -> Artifact {
    let mut t = Table::new(&["check", "instance", "status", "detail"]);
    for r in rows {
        t.row([r.check, r.instance.as_str(), r.status.as_str(), r.detail.as_str()]);
    }
    t.finish("lemmas.csv")
}

fn lemma_suite(cfg: &ExperimentConfig, seeds: &mut BTreeMap<String, u64>) -> Result<RunOutput, AppError> {
    let seed = derive_seed(cfg.seed, "suite", 0);
    seeds.insert("suite".into(), seed);
    let params = SuiteParams {
        ordering_instances: cfg.suite.ordering_instances,
        best_shot_instances: cfg.suite.best_shot_instances,
        resolution: cfg.suite.resolution,
        solver: cfg.solver_config()?,
        random_starts: cfg.solver.random_starts,
        seed,
    };
    let rows = checks::run_suite(&params)?;
    let mut by_check: BTreeMap<&str, [usize; 3]> = BTreeMap::new();
    for r in &rows {
        let slot = by_check.entry(r.check).or_default();
        slot[r.status as usize] += 1;
    }
    let mut summary = String::from("lemma-suite\n");
    for (check, [pass, fail, skip]) in &by_check {
        summary.push_str(&format!("{check}: {pass} pass, {fail} fail, {skip} skip\n"));
    }
    let failures = checks::count(&rows, Status::Fail);
    summary.push_str(&format!("overall: {}\n", if failures == 0 { "all checks pass" } else { "FAILURES" }));
    let report = json!({
        "experiment": "lemma-suite",
        "counts": by_check.iter().map(|(k, v)| (k.to_string(), json!({"pass": v[0], "fail": v[1], "skip": v[2]}))).collect::<serde_json::Map<_, _>>(),
        "failures": rows.iter().filter(|r| r.status == Status::Fail).collect::<Vec<_>>(),
    });
    Ok(RunOutput {
        artifacts: vec![check_table(&rows), report_artifact(&report)],
        summary,
        seeds: BTreeMap::new(),
    })
}

/// Ex-post class means compared with exact EU under the graph's empirical
/// beliefs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpostComparison {
    pub degree: usize,
    pub nodes: usize,
    pub mean: f64,
    pub std_error: f64,
    pub exact: f64,
}

impl ExpostComparison {
    /// Standardized gap; zero spread counts as agreement only on an exact match.
    pub fn agrees(&self, k: f64) -> bool {
        let gap = (self.mean - self.exact).abs();
        if self.std_error > 0.0 {
            gap <= k * self.std_error
        } else {
            gap <= 1e-12
        }
    }
}

/// Solves on the graph's empirical beliefs from the all-zero start, then
/// plays the equilibrium on the graph `trials` times.
pub fn expost_comparison(
    game: &Game,
    graph: &GraphInstance,
    solver: &secinvest_core::SolverConfig,
    trials: usize,
    seed: u64,
) -> Result<(EquilibriumReport, Vec<ExpostComparison>), AppError> {
    let start = starting_profiles(game, 0, 0).swap_remove(0).1;
    let rep = solve_symmetric_bne(game, solver, &start)?;
    let per_trial = (0..trials as u64)
        .into_par_iter()
        .map(|t| expost_trial(graph, &game.model, &game.grid, &rep.profile, seed, t))
        .collect::<secinvest_core::Result<Vec<_>>>()?;
    let summary = summarize_expost(graph, &per_trial)?;
    let mut out = Vec::new();
    for row in summary.rows {
        let eu = game.expected_utility_row(&rep.profile, row.degree)?;
        let law = rep.profile.law(row.degree).expect("degree in profile");
        let exact = law.iter().zip(&eu).map(|(p, u)| p * u).sum();
        out.push(ExpostComparison {
            degree: row.degree,
            nodes: row.nodes,
            mean: row.mean,
            std_error: row.std_error,
            exact,
        });
    }
    Ok((rep, out))
}

fn expost_validate(cfg: &ExperimentConfig, seeds: &mut BTreeMap<String, u64>) -> Result<RunOutput, AppError> {
    let g = sample(cfg, seeds)?;
    let game = game(cfg, empirical_beliefs(&g)?)?;
    let seed = derive_seed(cfg.seed, "expost", 0);
    seeds.insert("expost".into(), seed);
    let (rep, rows) = expost_comparison(&game, &g, &cfg.solver_config()?, cfg.expost.trials, seed)?;
    let mut t = Table::new(&["degree", "nodes", "trials", "mean", "std_error", "exact_eu", "z", "within_4se"]);
    let mut agree = 0;
    for r in &rows {
        let z = if r.std_error > 0.0 { (r.mean - r.exact) / r.std_error } else { 0.0 };
        agree += usize::from(r.agrees(4.0));
        t.row([
            r.degree.to_string(),
            r.nodes.to_string(),
            cfg.expost.trials.to_string(),
            num(r.mean),
            num(r.std_error),
            num(r.exact),
            num(z),
            r.agrees(4.0).to_string(),
        ]);
    }
    let summary = format!(
        "expost-validate: n={} edges={} achieved_r={:.4}; equilibrium converged={} residual={:e}\n\
         {agree}/{} degree classes within 4 standard errors of exact EU\n",
        g.n(),
        g.edge_count(),
        g.meta.achieved_r,
        rep.converged,
        rep.residual,
        rows.len()
    );
    let report = json!({
        "experiment": "expost-validate",
        "instance": describe(&game),
        "graph": graph_json(&g),
        "equilibrium": equilibrium_json("zero", &rep),
        "classes": rows.len(),
        "agreeing_classes": agree,
    });
    Ok(RunOutput {
        artifacts: vec![t.finish("expost.csv"), edge_list(&g), report_artifact(&report)],
        summary,
        seeds: BTreeMap::new(),
    })
}
