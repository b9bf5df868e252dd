//! Built-in instance sets used by `lemma-suite` and the acceptance tests.

use rand::Rng;
use secinvest_core::payoff::{classify_strategic_interaction, StrategicInteraction};
use secinvest_core::seed::{derive_seed, rng_from_seed, Rng as CoreRng};
use secinvest_core::{
    check_association, generate_monotone_test_functions, ActionGrid, AssociationTest,
    AssociationVerdict, BenefitFunction, CostFunction, Game, NeighborBeliefs, PayoffModel,
    StrategyProfile,
};

/// Number of random monotone test functions in association audits.
pub const AUDIT_FUNCTIONS: usize = 64;

/// How neighbor degrees depend on own degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Correlation {
    Positive,
    Negative,
    Independent,
}

impl Correlation {
    pub const ALL: [Correlation; 3] = [Correlation::Positive, Correlation::Negative, Correlation::Independent];

    pub fn as_str(self) -> &'static str {
        match self {
            Correlation::Positive => "positive",
            Correlation::Negative => "negative",
            Correlation::Independent => "independent",
        }
    }

    /// Belief rows on own degrees 1..=3 over neighbor degrees 1..=3.
    pub fn beliefs(self) -> NeighborBeliefs {
        let low = vec![0.6, 0.3, 0.1];
        let mid = vec![0.3, 0.4, 0.3];
        let high = vec![0.1, 0.3, 0.6];
        let rows = match self {
            Correlation::Positive => vec![(1, low), (2, mid), (3, high)],
            Correlation::Negative => vec![(1, high), (2, mid), (3, low)],
            Correlation::Independent => return NeighborBeliefs::independent(mid, vec![1, 2, 3]).unwrap(),
        };
        NeighborBeliefs::conditional_iid(rows).unwrap()
    }
}

/// Verdict of the seeded association audit over all degree pairs with
/// subset size 1.
pub fn audit_association(beliefs: &NeighborBeliefs, seed: u64) -> secinvest_core::Result<AssociationVerdict> {
    let fs = generate_monotone_test_functions(beliefs.max_degree(), 1, AUDIT_FUNCTIONS, seed)?;
    let test = AssociationTest::all_pairs(beliefs, 1, fs)?;
    Ok(check_association(beliefs, &test)?.verdict)
}

#[derive(Debug, Clone)]
pub struct SuiteInstance {
    pub name: String,
    pub game: Game,
    pub interaction: StrategicInteraction,
    pub correlation: Correlation,
}

/// Strict substitutes (concave benefit) and strict complements (convex
/// benefit), each under positive, negative and no degree correlation.
pub fn interaction_suite(resolution: usize) -> Vec<SuiteInstance> {
    let grid = ActionGrid::uniform(resolution).unwrap();
    let substitutes =
        PayoffModel::sum_of_investments(BenefitFunction::Power { alpha: 0.5 }, CostFunction::Linear { c0: 0.8 }, 1.0)
            .unwrap();
    let complements =
        PayoffModel::sum_of_investments(BenefitFunction::Power { alpha: 1.5 }, CostFunction::Quadratic { c0: 1.0 }, 0.5)
            .unwrap();
    let mut out = Vec::new();
    for (label, model, interaction) in [
        ("substitutes", substitutes, StrategicInteraction::Substitutes),
        ("complements", complements, StrategicInteraction::Complements),
    ] {
        for c in Correlation::ALL {
            out.push(SuiteInstance {
                name: format!("{label}-{}", c.as_str()),
                game: Game::new(model, c.beliefs(), grid.clone()).unwrap(),
                interaction,
                correlation: c,
            });
        }
    }
    out
}

/// Starting profiles: everyone at 0, at 1, at the grid midpoint, plus
/// `random` seeded draws.
pub fn starting_profiles(game: &Game, random: usize, seed: u64) -> Vec<(String, StrategyProfile)> {
    let degrees: Vec<usize> = all_degrees(game);
    let n = game.grid.len();
    let mut out = vec![
        ("zero".to_string(), StrategyProfile::constant_pure(&game.grid, &degrees, 0).unwrap()),
        ("one".to_string(), StrategyProfile::constant_pure(&game.grid, &degrees, n - 1).unwrap()),
    ];
    if game.grid.is_binary() {
        let half: Vec<(usize, f64)> = degrees.iter().map(|&d| (d, 0.5)).collect();
        out.push(("half".to_string(), StrategyProfile::binary(&half).unwrap()));
    } else {
        out.push(("half".to_string(), StrategyProfile::constant_pure(&game.grid, &degrees, (n - 1) / 2).unwrap()));
    }
    for i in 0..random {
        let mut r = rng_from_seed(derive_seed(seed, "start", i as u64));
        let p = if game.grid.is_binary() {
            let probs: Vec<(usize, f64)> = degrees.iter().map(|&d| (d, r.gen::<f64>())).collect();
            StrategyProfile::binary(&probs).unwrap()
        } else {
            let acts: Vec<(usize, usize)> = degrees.iter().map(|&d| (d, r.gen_range(0..n))).collect();
            StrategyProfile::pure(&game.grid, &acts).unwrap()
        };
        out.push((format!("random-{i}"), p));
    }
    out
}

/// Own degrees plus every degree reachable as a neighbor.
pub fn all_degrees(game: &Game) -> Vec<usize> {
    let mut ds: Vec<usize> = game.degrees().to_vec();
    for &d in game.degrees() {
        ds.extend(game.beliefs.neighbor_support(d).unwrap_or_default());
    }
    ds.sort_unstable();
    ds.dedup();
    ds
}

fn random_row(r: &mut CoreRng, len: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..len).map(|_| r.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

/// Rows for own degrees 1..=3, each stochastically dominating the last.
fn dominance_chain(r: &mut CoreRng) -> Vec<Vec<f64>> {
    let mut rows = vec![random_row(r, 3)];
    for _ in 1..3 {
        let last = rows.last().unwrap();
        let mut next = vec![0.0; 3];
        for (k, &p) in last.iter().enumerate() {
            let keep = if k + 1 < 3 { r.gen_range(0.0..1.0) } else { 1.0 };
            next[k] += p * keep;
            if keep < 1.0 {
                next[r.gen_range(k + 1..3)] += p * (1.0 - keep);
            }
        }
        rows.push(next);
    }
    rows
}

/// A game meeting the hypotheses of the degree-ordering result, with a
/// monotone pure profile in the matching direction.
#[derive(Debug, Clone)]
pub struct OrderingInstance {
    pub game: Game,
    pub profile: StrategyProfile,
    pub interaction: StrategicInteraction,
    pub association: AssociationVerdict,
}

/// Draws instances until `count` pass all three hypothesis checks: the
/// exhaustive interaction scan, the association audit and link dropping
/// (which every shipped family satisfies; the caller re-checks it).
pub fn ordering_instances(count: usize, seed: u64) -> Vec<OrderingInstance> {
    let mut out = Vec::with_capacity(count);
    let mut attempt = 0u64;
    while out.len() < count {
        let mut r = rng_from_seed(derive_seed(seed, "ordering-instance", attempt));
        attempt += 1;
        let complements = attempt.is_multiple_of(2);
        let mut rows = dominance_chain(&mut r);
        if !complements {
            rows.reverse();
        }
        let beliefs = NeighborBeliefs::conditional_iid(rows.into_iter().enumerate().map(|(i, x)| (i + 1, x)).collect())
            .unwrap();
        let Ok(verdict) = audit_association(&beliefs, derive_seed(seed, "ordering-audit", attempt)) else { continue };
        let alpha = if complements { r.gen_range(1.1..3.0) } else { r.gen_range(0.1..0.95) };
        let benefit = if !complements && r.gen_bool(0.3) { BenefitFunction::Log } else { BenefitFunction::Power { alpha } };
        let c0 = r.gen_range(0.1..1.5);
        let cost = if r.gen_bool(0.5) { CostFunction::Linear { c0 } } else { CostFunction::Quadratic { c0 } };
        let model = PayoffModel::sum_of_investments(benefit, cost, r.gen_range(0.05..=1.0)).unwrap();
        let grid = ActionGrid::uniform(r.gen_range(3..=9)).unwrap();
        let interaction = classify_strategic_interaction(&model, 3, &grid).class;
        let (want_i, want_a) = if complements {
            (StrategicInteraction::Complements, AssociationVerdict::Positive)
        } else {
            (StrategicInteraction::Substitutes, AssociationVerdict::Negative)
        };
        if interaction != want_i || verdict != want_a {
            continue;
        }
        let mut idx: Vec<usize> = (0..3).map(|_| r.gen_range(0..grid.len())).collect();
        idx.sort_unstable();
        if !complements {
            idx.reverse();
        }
        let acts: Vec<(usize, usize)> = idx.iter().enumerate().map(|(i, &a)| (i + 1, a)).collect();
        let game = Game::new(model, beliefs, grid).unwrap();
        let profile = StrategyProfile::pure(&game.grid, &acts).unwrap();
        out.push(OrderingInstance {
            game,
            profile,
            interaction,
            association: verdict,
        });
    }
    out
}

/// Best-shot games with independent neighbor degrees `1..=top`, where `top`
/// cycles through `2..=max_degree`.
pub fn best_shot_independent(count: usize, max_degree: usize, seed: u64) -> Vec<Game> {
    (0..count as u64)
        .map(|i| {
            let mut r = rng_from_seed(derive_seed(seed, "best-shot-instance", i));
            let top = 2 + (i as usize % (max_degree - 1));
            let row = random_row(&mut r, top);
            let model = PayoffModel::best_shot(CostFunction::Linear { c0: r.gen_range(0.05..0.95) }).unwrap();
            Game::new(model, NeighborBeliefs::independent(row, (1..=top).collect()).unwrap(), ActionGrid::binary())
                .unwrap()
        })
        .collect()
}
