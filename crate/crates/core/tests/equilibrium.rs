mod common;

use common::{brute_force_eu, random_beliefs, random_law, random_row, rng};
use proptest::prelude::*;
use rand::Rng;
use secinvest_core::equilibrium::{best_response_index, verify_payoff_ordering};
use secinvest_core::expected_utility::check_degree_complementarity;
use secinvest_core::payoff::{classify_strategic_interaction, StrategicInteraction};
use secinvest_core::{
    check_association, enumerate_symmetric_equilibria, generate_monotone_test_functions,
    solve_symmetric_bne, verify_headline, ActionGrid, AssociationTest, AssociationVerdict,
    BeliefKind, BenefitFunction, CostFunction, EquilibriumReport, Game, GameKind, Monotonicity,
    NeighborBeliefs, PayoffModel, SolverConfig, StrategyProfile, TieBreak,
};

fn delta(k: usize, len: usize) -> Vec<f64> {
    let mut r = vec![0.0; len];
    r[k - 1] = 1.0;
    r
}

/// Largest gain from a grid deviation, recomputed by brute force.
fn brute_force_residual(game: &Game, report: &EquilibriumReport) -> f64 {
    let pts = game.model.admissible_points(&game.grid);
    let mut worst: f64 = 0.0;
    for &d in game.degrees() {
        let law = report.profile.law(d).unwrap();
        let eus: Vec<f64> = game.grid.points().iter().map(|&x| {
            if pts.contains(&x) { brute_force_eu(game, &report.profile, d, x) } else { f64::NEG_INFINITY }
        }).collect();
        let played: f64 = law.iter().zip(&eus).filter(|(p, _)| **p > 0.0).map(|(p, v)| p * v).sum();
        let best = eus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(best - played);
    }
    worst
}

fn concave_model(r: &mut rand_chacha::ChaCha8Rng) -> PayoffModel {
    let benefit = match r.gen_range(0..3) {
        0 => BenefitFunction::Log,
        1 => BenefitFunction::LinearSaturating,
        _ => BenefitFunction::Power { alpha: r.gen_range(0.2..0.9) },
    };
    let c0 = r.gen_range(0.1..1.5);
    let cost = if r.gen_bool(0.5) { CostFunction::Linear { c0 } } else { CostFunction::Quadratic { c0 } };
    PayoffModel::sum_of_investments(benefit, cost, r.gen_range(0.1..=1.0)).unwrap()
}

fn start_profile(game: &Game, r: &mut rand_chacha::ChaCha8Rng) -> StrategyProfile {
    let degrees: Vec<usize> = (1..=3).collect();
    if game.grid.is_binary() {
        let probs: Vec<(usize, f64)> = degrees.iter().map(|&d| (d, r.gen_range(0.0..=1.0))).collect();
        StrategyProfile::binary(&probs).unwrap()
    } else {
        let acts: Vec<(usize, usize)> = degrees.iter().map(|&d| (d, r.gen_range(0..game.grid.len()))).collect();
        StrategyProfile::pure(&game.grid, &acts).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solved_profiles_survive_an_independent_deviation_scan(seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = if r.gen_bool(0.5) {
            PayoffModel::best_shot(CostFunction::Linear { c0: r.gen_range(0.05..0.95) }).unwrap()
        } else {
            concave_model(&mut r)
        };
        let grid = if model.kind == GameKind::BestShot { ActionGrid::binary() } else { ActionGrid::uniform(r.gen_range(3..=9)).unwrap() };
        let beliefs = random_beliefs(&mut r, BeliefKind::ConditionalIid);
        let full: Vec<(usize, Vec<f64>)> = (1..=3).map(|d| (d, beliefs.row(d).map(<[f64]>::to_vec).unwrap_or_else(|| random_row(&mut r, 3)))).collect();
        let game = Game::new(model, NeighborBeliefs::conditional_iid(full).unwrap(), grid).unwrap();
        let start = start_profile(&game, &mut r);
        let cfg = SolverConfig::default();
        let rep = solve_symmetric_bne(&game, &cfg, &start).unwrap();
        if rep.converged {
            prop_assert!(rep.residual <= cfg.eps_fix);
            prop_assert!(brute_force_residual(&game, &rep) <= cfg.eps_fix + 1e-12);
            let again = solve_symmetric_bne(&game, &cfg, &rep.profile).unwrap();
            prop_assert!(again.converged && again.iterations <= 1 && again.residual <= cfg.eps_fix);
        }
    }

    #[test]
    fn others_investing_more_never_raises_a_best_response(seed in any::<u64>(), which in 1usize..=3) {
        let mut r = rng(seed);
        let model = concave_model(&mut r);
        let grid = ActionGrid::uniform(r.gen_range(3..=9)).unwrap();
        let full: Vec<(usize, Vec<f64>)> = (1..=3).map(|d| (d, random_row(&mut r, 3))).collect();
        let game = Game::new(model, NeighborBeliefs::conditional_iid(full).unwrap(), grid).unwrap();
        let laws: Vec<(usize, Vec<f64>)> = (1..=3).map(|d| (d, random_law(&mut r, game.grid.len()))).collect();
        let profile = StrategyProfile::from_laws(&game.grid, laws).unwrap();
        let law = profile.law(which).unwrap();
        let mut up = vec![0.0; law.len()];
        for (i, &p) in law.iter().enumerate() {
            let to = r.gen_range(i..law.len());
            up[to] += p;
        }
        let raised = profile.with_law(which, up).unwrap();
        for d in 1..=3 {
            for tie in [TieBreak::SmallestAction, TieBreak::LargestAction] {
                let before = best_response_index(&game, &profile, d, tie).unwrap();
                let after = best_response_index(&game, &raised, d, tie).unwrap();
                prop_assert!(after <= before, "d={} before={} after={}", d, before, after);
            }
        }
    }

    #[test]
    fn degree_ordering_follows_spillover_ordering(seed in any::<u64>(), complements in any::<bool>()) {
        // Rows ordered by stochastic dominance, the payoff classified by the
        // exhaustive scan, the association by the randomized audit, and a
        // monotone profile in the matching direction.
        let mut r = rng(seed);
        let base = random_row(&mut r, 3);
        let mut rows = vec![base];
        for _ in 1..3 {
            let last = rows.last().unwrap().clone();
            let mut next = vec![0.0; 3];
            for (k, &p) in last.iter().enumerate() {
                let to = r.gen_range(k..3);
                next[to] += p;
            }
            rows.push(next);
        }
        if !complements {
            rows.reverse();
        }
        let beliefs = NeighborBeliefs::conditional_iid(rows.into_iter().enumerate().map(|(i, row)| (i + 1, row)).collect()).unwrap();
        let fs = generate_monotone_test_functions(3, 1, 64, seed).unwrap();
        let audit = check_association(&beliefs, &AssociationTest::all_pairs(&beliefs, 1, fs).unwrap()).unwrap();
        let alpha = if complements { r.gen_range(1.2..2.5) } else { r.gen_range(0.2..0.9) };
        let model = PayoffModel::sum_of_investments(BenefitFunction::Power { alpha }, CostFunction::Quadratic { c0: r.gen_range(0.1..1.0) }, r.gen_range(0.1..=1.0)).unwrap();
        let grid = ActionGrid::uniform(5).unwrap();
        let class = classify_strategic_interaction(&model, 3, &grid).class;
        let wanted = if complements { StrategicInteraction::Complements } else { StrategicInteraction::Substitutes };
        let verdict = if complements { AssociationVerdict::Positive } else { AssociationVerdict::Negative };
        prop_assume!(class == wanted && audit.verdict == verdict);
        let mut idx: Vec<usize> = (0..3).map(|_| r.gen_range(0..5)).collect();
        idx.sort_unstable();
        if !complements {
            idx.reverse();
        }
        let acts: Vec<(usize, usize)> = idx.iter().enumerate().map(|(i, &a)| (i + 1, a)).collect();
        let game = Game::new(model, beliefs, grid).unwrap();
        let profile = StrategyProfile::pure(&game.grid, &acts).unwrap();
        let rep = check_degree_complementarity(&game, &profile, &[1, 2, 3]).unwrap();
        let result = if complements { rep.complements } else { rep.substitutes };
        prop_assert_eq!(result, Some(Ok(())));
    }
}

#[test]
fn regular_best_shot_matches_indifference() {
    for &c in &[0.1, 0.25, 0.5, 0.75] {
        for d in 1..=4 {
            let model = PayoffModel::best_shot(CostFunction::Linear { c0: c }).unwrap();
            let game = Game::new(model, NeighborBeliefs::regular(d).unwrap(), ActionGrid::binary()).unwrap();
            let start = StrategyProfile::binary(&[(d, 0.0)]).unwrap();
            let rep = solve_symmetric_bne(&game, &SolverConfig::default(), &start).unwrap();
            let p_star = 1.0 - f64::powf(c, 1.0 / d as f64);
            assert!(rep.converged, "c={c} d={d}");
            assert!((rep.actions[0] - p_star).abs() < 1e-6, "c={c} d={d} p={}", rep.actions[0]);
        }
    }
}

#[test]
fn regular_family_pins_payoffs_at_the_outside_option() {
    let model = PayoffModel::best_shot(CostFunction::Linear { c0: 0.25 }).unwrap();
    let rows = (1..=3).map(|d| (d, delta(d, 3))).collect();
    let game = Game::new(model, NeighborBeliefs::conditional_iid(rows).unwrap(), ActionGrid::binary()).unwrap();
    let start = StrategyProfile::binary(&[(1, 0.0), (2, 0.0), (3, 0.0)]).unwrap();
    let rep = solve_symmetric_bne(&game, &SolverConfig::default(), &start).unwrap();
    assert!(rep.converged);
    for (i, d) in (1..=3).enumerate() {
        assert!((rep.eu_star[i] - 0.75).abs() < 1e-8, "d={d} eu={}", rep.eu_star[i]);
    }
    assert_eq!(rep.monotonicity, Monotonicity::NonIncreasing);
    let v = verify_payoff_ordering(std::slice::from_ref(&rep), AssociationVerdict::Positive);
    assert_eq!(v.checked, 0);
    assert!(verify_headline(&[rep]).holds());
}

#[test]
fn strict_substitutes_with_negative_association() {
    let model = PayoffModel::sum_of_investments(BenefitFunction::Power { alpha: 0.5 }, CostFunction::Linear { c0: 0.8 }, 1.0).unwrap();
    let beliefs = NeighborBeliefs::conditional_iid(vec![
        (1, vec![0.1, 0.3, 0.6]),
        (2, vec![0.3, 0.4, 0.3]),
        (3, vec![0.6, 0.3, 0.1]),
    ])
    .unwrap();
    let fs = generate_monotone_test_functions(3, 1, 64, 1).unwrap();
    let audit = check_association(&beliefs, &AssociationTest::all_pairs(&beliefs, 1, fs).unwrap()).unwrap();
    assert_eq!(audit.verdict, AssociationVerdict::Negative);
    let game = Game::new(model, beliefs, ActionGrid::uniform(21).unwrap()).unwrap();
    let cfg = SolverConfig::default();
    let start = StrategyProfile::constant_pure(&game.grid, &[1, 2, 3], 0).unwrap();
    let rep = solve_symmetric_bne(&game, &cfg, &start).unwrap();
    assert!(rep.converged, "residual {}", rep.residual);
    assert!(brute_force_residual(&game, &rep) <= cfg.eps_fix);
    assert!(rep.monotonicity.is_non_increasing(), "{:?}", rep.actions);
    assert!(rep.eu_monotonicity.is_non_decreasing(), "{:?}", rep.eu_star);
    assert!(verify_payoff_ordering(std::slice::from_ref(&rep), AssociationVerdict::Negative).holds());
    assert!(verify_headline(&[rep]).holds());
}

#[test]
fn best_shot_with_independent_degrees_has_only_non_increasing_equilibria() {
    let mut r = rng(99);
    let cfg = SolverConfig { mixing_levels: 11, ..SolverConfig::default() };
    let mut total = 0;
    for _ in 0..20 {
        let max = r.gen_range(1..=3);
        let row = random_row(&mut r, max);
        let model = PayoffModel::best_shot(CostFunction::Linear { c0: r.gen_range(0.05..0.95) }).unwrap();
        let game = Game::new(model, NeighborBeliefs::independent(row, (1..=max).collect()).unwrap(), ActionGrid::binary()).unwrap();
        for rep in enumerate_symmetric_equilibria(&game, &cfg).unwrap() {
            assert!(rep.monotonicity.is_non_increasing(), "{:?}", rep.actions);
            assert!(rep.eu_monotonicity.is_non_decreasing(), "{:?}", rep.eu_star);
            total += 1;
        }
    }
    assert!(total > 0);
}

#[test]
fn pure_enumeration_respects_the_budget() {
    let model = PayoffModel::sum_of_investments(BenefitFunction::Log, CostFunction::Linear { c0: 0.5 }, 0.5).unwrap();
    let b = NeighborBeliefs::independent(vec![0.5, 0.5], vec![1, 2]).unwrap();
    let game = Game::new(model, b, ActionGrid::uniform(11).unwrap()).unwrap().with_budget(100);
    assert!(matches!(
        enumerate_symmetric_equilibria(&game, &SolverConfig::default()),
        Err(secinvest_core::Error::Budget { needed: 121, budget: 100, .. })
    ));
}
