#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use secinvest_core::payoff::utility;
use secinvest_core::{
    ActionGrid, BeliefKind, BenefitFunction, CostFunction, Game, NeighborBeliefs, PayoffModel,
    StrategyProfile,
};

pub const MAX_NEIGHBOR_DEGREE: usize = 3;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every neighbor-degree tuple with its probability, spelled out.
pub fn neighbor_degree_tuples(b: &NeighborBeliefs, d: usize) -> Vec<(Vec<usize>, f64)> {
    if b.kind() == BeliefKind::FullJoint {
        return b.joint(d).unwrap().to_vec();
    }
    let row = b.row(d).unwrap();
    let mut out = Vec::new();
    let mut tuple = vec![1usize; d];
    loop {
        let p: f64 = tuple.iter().map(|&k| row[k - 1]).product();
        if p > 0.0 {
            out.push((tuple.clone(), p));
        }
        let mut pos = d;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] <= row.len() {
                break;
            }
            tuple[pos] = 1;
        }
    }
}

/// Expected utility by summing over every neighbor-degree tuple and every
/// neighbor action tuple.
pub fn brute_force_eu(game: &Game, profile: &StrategyProfile, d: usize, x: f64) -> f64 {
    let points = game.grid.points();
    let mut total = 0.0;
    for (degs, pd) in neighbor_degree_tuples(&game.beliefs, d) {
        let laws: Vec<&[f64]> = degs.iter().map(|&k| profile.law(k).unwrap()).collect();
        let mut idx = vec![0usize; d];
        'outer: loop {
            let p: f64 = idx.iter().zip(&laws).map(|(&i, l)| l[i]).product();
            if p > 0.0 {
                let acts: Vec<f64> = idx.iter().map(|&i| points[i]).collect();
                total += pd * p * utility(&game.model, x, &acts).unwrap();
            }
            let mut pos = d;
            loop {
                if pos == 0 {
                    break 'outer;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < points.len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
    total
}

pub fn random_row(r: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..len)
        .map(|_| if r.gen_bool(0.2) { 0.0 } else { r.gen_range(0.05..1.0) })
        .collect();
    let total: f64 = w.iter().sum();
    if total == 0.0 {
        let mut v = vec![0.0; len];
        v[len - 1] = 1.0;
        return v;
    }
    w.iter().map(|x| x / total).collect()
}

pub fn random_law(r: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let mut law = random_row(r, len);
    // Put any rounding residue on the largest entry so the law sums to 1.
    let total: f64 = law.iter().sum();
    let (i, _) = law.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    law[i] += 1.0 - total;
    law
}

pub fn random_model(r: &mut ChaCha8Rng) -> PayoffModel {
    if r.gen_bool(0.25) {
        return PayoffModel::best_shot(CostFunction::Linear { c0: r.gen_range(0.0..1.0) }).unwrap();
    }
    let benefit = match r.gen_range(0..4) {
        0 => BenefitFunction::LinearSaturating,
        1 => BenefitFunction::Log,
        2 => BenefitFunction::Power { alpha: r.gen_range(0.2..1.0) },
        _ => BenefitFunction::Power { alpha: r.gen_range(1.0..2.5) },
    };
    let c0 = r.gen_range(0.0..1.5);
    let cost = if r.gen_bool(0.5) { CostFunction::Linear { c0 } } else { CostFunction::Quadratic { c0 } };
    PayoffModel::sum_of_investments(benefit, cost, r.gen_range(0.0..=1.0)).unwrap()
}

/// Exchangeable joint law over `{1..=max}^d`: weights on sorted tuples,
/// spread evenly over their permutations.
pub fn random_joint(r: &mut ChaCha8Rng, d: usize, max: usize) -> Vec<(Vec<usize>, f64)> {
    let mut all = Vec::new();
    let mut tuple = vec![1usize; d];
    loop {
        all.push(tuple.clone());
        let mut pos = d;
        let mut done = true;
        while pos > 0 {
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] <= max {
                done = false;
                break;
            }
            tuple[pos] = 1;
        }
        if done {
            break;
        }
    }
    let sorted: Vec<Vec<usize>> = all.iter().filter(|t| t.windows(2).all(|w| w[0] <= w[1])).cloned().collect();
    let weights = random_law(r, sorted.len());
    let mut out = Vec::new();
    for t in &all {
        let mut key = t.clone();
        key.sort_unstable();
        let k = sorted.iter().position(|s| *s == key).unwrap();
        let perms = all.iter().filter(|u| {
            let mut v = (*u).clone();
            v.sort_unstable();
            v == key
        }).count();
        out.push((t.clone(), weights[k] / perms as f64));
    }
    out
}

pub fn random_beliefs(r: &mut ChaCha8Rng, kind: BeliefKind) -> NeighborBeliefs {
    let mut own: Vec<usize> = (1..=MAX_NEIGHBOR_DEGREE).filter(|_| r.gen_bool(0.7)).collect();
    if own.is_empty() {
        own.push(r.gen_range(1..=MAX_NEIGHBOR_DEGREE));
    }
    match kind {
        BeliefKind::Independent => NeighborBeliefs::independent(random_row(r, MAX_NEIGHBOR_DEGREE), own).unwrap(),
        BeliefKind::ConditionalIid => NeighborBeliefs::conditional_iid(
            own.iter().map(|&d| (d, random_row(r, MAX_NEIGHBOR_DEGREE))).collect(),
        )
        .unwrap(),
        BeliefKind::FullJoint => NeighborBeliefs::full_joint(
            own.iter().map(|&d| (d, random_joint(r, d, MAX_NEIGHBOR_DEGREE))).collect(),
            4,
        )
        .unwrap(),
    }
}

pub fn random_grid(r: &mut ChaCha8Rng, model: &PayoffModel) -> ActionGrid {
    if model.kind == secinvest_core::GameKind::BestShot {
        ActionGrid::binary()
    } else {
        ActionGrid::uniform(r.gen_range(2..=5)).unwrap()
    }
}

/// A profile with a random law at every degree a neighbor can have.
pub fn random_profile(r: &mut ChaCha8Rng, grid: &ActionGrid) -> StrategyProfile {
    let laws = (1..=MAX_NEIGHBOR_DEGREE).map(|d| (d, random_law(r, grid.len()))).collect();
    StrategyProfile::from_laws(grid, laws).unwrap()
}

pub fn random_game(seed: u64) -> (Game, StrategyProfile) {
    let mut r = rng(seed);
    let model = random_model(&mut r);
    let kind = match r.gen_range(0..3) {
        0 => BeliefKind::Independent,
        1 => BeliefKind::ConditionalIid,
        _ => BeliefKind::FullJoint,
    };
    let beliefs = random_beliefs(&mut r, kind);
    let grid = random_grid(&mut r, &model);
    let profile = random_profile(&mut r, &grid);
    (Game::new(model, beliefs, grid).unwrap(), profile)
}
