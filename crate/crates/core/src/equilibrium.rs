//! Symmetric Bayesian equilibria on a finite action grid.
//!
//! A profile is an equilibrium when no degree can raise its expected utility
//! by more than `eps_fix` by switching to any grid action. On the binary
//! grid players mix (a law `[1 - p, p]`); on finer grids profiles are pure.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::degree_model::AssociationVerdict;
use crate::error::{input, Error, Result};
use crate::expected_utility::{Game, StrategyProfile};
use crate::monotone::{classify, Monotonicity};
use crate::tuples::{tuple_count, Odometer};

/// Utility values within this distance of the maximum count as ties.
pub const TIE_TOL: f64 = 1e-12;
/// Tolerance for monotonicity verdicts on equilibrium actions and payoffs.
pub const MONOTONE_TOL: f64 = 1e-9;
/// Largest own degree accepted by mixed-strategy enumeration.
pub const ENUMERATION_MAX_DEGREE: usize = 4;
/// Largest number of mixing levels accepted by enumeration.
pub const ENUMERATION_MAX_LEVELS: usize = 21;

const STEP_GROWTH: f64 = 1.2;
const STEP_SHRINK: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    SmallestAction,
    LargestAction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Initial (and maximum) step toward the best response, in `(0, 1]`.
    pub damping: f64,
    pub max_iterations: usize,
    pub tie_break: TieBreak,
    /// Largest admissible gain from a deviation at an equilibrium.
    pub eps_fix: f64,
    /// Probability levels `0, 1/(L-1), ..., 1` scanned by mixed enumeration.
    pub mixing_levels: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            damping: 0.5,
            max_iterations: 10_000,
            tie_break: TieBreak::SmallestAction,
            eps_fix: 1e-9,
            mixing_levels: 21,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::Input(format!("damping must lie in (0, 1], got {}", self.damping)));
        }
        if self.max_iterations == 0 {
            return Err(input("max_iterations must be at least 1"));
        }
        if !(self.eps_fix.is_finite() && self.eps_fix >= 0.0) {
            return Err(input("eps_fix must be a non-negative number"));
        }
        if self.mixing_levels < 2 {
            return Err(input("mixing_levels must be at least 2"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    BestResponseIteration,
    ExhaustiveEnumeration,
}

impl SolveMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveMethod::BestResponseIteration => "best-response-iteration",
            SolveMethod::ExhaustiveEnumeration => "exhaustive-enumeration",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    pub profile: StrategyProfile,
    /// Degrees in play, ascending; the vectors below are indexed alike.
    pub degrees: Vec<usize>,
    /// Mean action `x*(d)` (the investment probability on the binary grid).
    pub actions: Vec<f64>,
    /// Expected utility of the played law, `EU*(d)`.
    pub eu_star: Vec<f64>,
    /// Best grid response at each degree.
    pub best_response: Vec<f64>,
    pub monotonicity: Monotonicity,
    pub eu_monotonicity: Monotonicity,
    pub method: SolveMethod,
    pub converged: bool,
    pub iterations: usize,
    /// Largest gain any degree could get by deviating.
    pub residual: f64,
}

struct DegreeState {
    best: usize,
    played: f64,
    gain: f64,
}

fn argmax(row: &[f64], tie: TieBreak) -> usize {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut candidates = row.iter().enumerate().filter(|(_, v)| **v >= max - TIE_TOL).map(|(i, _)| i);
    match tie {
        TieBreak::SmallestAction => candidates.next().unwrap_or(0),
        TieBreak::LargestAction => candidates.next_back().unwrap_or(0),
    }
}

fn evaluate_degree(game: &Game, profile: &StrategyProfile, d: usize, tie: TieBreak) -> Result<DegreeState> {
    let row = game.expected_utility_row(profile, d)?;
    let best = argmax(&row, tie);
    let law = profile.law(d).ok_or_else(|| Error::Input(format!("profile has no law for degree {d}")))?;
    let played: f64 = law.iter().zip(&row).map(|(p, v)| p * v).sum();
    let gain = (row[best] - played).max(0.0);
    Ok(DegreeState { best, played, gain })
}

/// Grid index of the best response of a degree-`d` player to `profile`.
pub fn best_response_index(game: &Game, profile: &StrategyProfile, d: usize, tie: TieBreak) -> Result<usize> {
    let row = game.expected_utility_row(profile, d)?;
    Ok(argmax(&row, tie))
}

/// Best grid action of a degree-`d` player against `profile`.
pub fn best_response(game: &Game, profile: &StrategyProfile, d: usize, tie: TieBreak) -> Result<f64> {
    best_response_index(game, profile, d, tie).map(|i| game.grid.point(i))
}

/// Largest gain any degree in play can get by deviating from `profile`.
pub fn deviation_residual(game: &Game, profile: &StrategyProfile) -> Result<f64> {
    let mut residual: f64 = 0.0;
    for &d in game.degrees() {
        residual = residual.max(evaluate_degree(game, profile, d, TieBreak::SmallestAction)?.gain);
    }
    Ok(residual)
}

fn build_report(
    game: &Game,
    profile: StrategyProfile,
    states: &[DegreeState],
    method: SolveMethod,
    converged: bool,
    iterations: usize,
    residual: f64,
) -> EquilibriumReport {
    let degrees = game.degrees().to_vec();
    let actions: Vec<f64> = degrees
        .iter()
        .map(|&d| profile.mean_action(&game.grid, d).unwrap_or(f64::NAN))
        .collect();
    let eu_star: Vec<f64> = states.iter().map(|s| s.played).collect();
    let restricted = profile.restricted_to(&degrees);
    EquilibriumReport {
        monotonicity: restricted.monotonicity(MONOTONE_TOL),
        eu_monotonicity: classify(&eu_star, MONOTONE_TOL),
        best_response: states.iter().map(|s| game.grid.point(s.best)).collect(),
        profile,
        degrees,
        actions,
        eu_star,
        method,
        converged,
        iterations,
        residual,
    }
}

/// Law of a position `y` in grid-index units: a point mass when `y` is an
/// integer, otherwise a mixture of the two neighboring grid points.
fn interpolated_law(len: usize, y: f64) -> Vec<f64> {
    let mut law = vec![0.0; len];
    let i = (libm::floor(y) as usize).min(len - 1);
    let frac = y - i as f64;
    if frac > 0.0 && i + 1 < len {
        law[i] = 1.0 - frac;
        law[i + 1] = frac;
    } else {
        law[i] = 1.0;
    }
    law
}

/// Damped best-response iteration.
///
/// Each degree's strategy is a position `y` on the grid: a point mass at a
/// grid point or a mixture of two adjacent points (on the binary grid, `y` is
/// the investment probability). The initial profile enters through the mean
/// grid index of each law. Every degree then moves simultaneously toward its
/// best response. The move is at most the degree's current step, measured in
/// action units, which starts at `damping`, halves whenever the direction of
/// travel reverses and grows by a fifth (up to `damping`) while it does not.
/// The first move from any start is therefore `damping` times the distance
/// to a best response at the other end of `[0, 1]`.
///
/// Running out of iterations is not an error: the last iterate comes back
/// with `converged = false`.
pub fn solve_symmetric_bne(
    game: &Game,
    config: &SolverConfig,
    initial: &StrategyProfile,
) -> Result<EquilibriumReport> {
    config.validate()?;
    game.check_profile(initial)?;
    let len = game.grid.len();
    let h = game.grid.step();
    let degrees = initial.degrees().to_vec();
    let mut ys: Vec<f64> = initial
        .laws()
        .iter()
        .map(|law| law.iter().enumerate().map(|(i, p)| i as f64 * p).sum::<f64>().clamp(0.0, (len - 1) as f64))
        .collect();
    let laws = degrees.iter().zip(&ys).map(|(&d, &y)| (d, interpolated_law(len, y))).collect();
    let mut profile = StrategyProfile::from_laws(&game.grid, laws)?;
    let active: Vec<usize> = game.degrees().to_vec();
    let mut step = vec![config.damping; active.len()];
    let mut last_dir = vec![0i8; active.len()];
    let mut iterations = 0;
    loop {
        let states = active
            .iter()
            .map(|&d| evaluate_degree(game, &profile, d, config.tie_break))
            .collect::<Result<Vec<_>>>()?;
        let residual = states.iter().map(|s| s.gain).fold(0.0, f64::max);
        let converged = residual <= config.eps_fix;
        if converged || iterations == config.max_iterations {
            return Ok(build_report(
                game,
                profile,
                &states,
                SolveMethod::BestResponseIteration,
                converged,
                iterations,
                residual,
            ));
        }
        for (i, &d) in active.iter().enumerate() {
            let slot = degrees.binary_search(&d).expect("checked profile");
            let y = ys[slot];
            let t = states[i].best as f64;
            let dir: i8 = if t > y {
                1
            } else if t < y {
                -1
            } else {
                0
            };
            if dir == 0 {
                continue;
            }
            if last_dir[i] != 0 && dir != last_dir[i] {
                step[i] *= STEP_SHRINK;
            } else if last_dir[i] == dir {
                step[i] = (step[i] * STEP_GROWTH).min(config.damping);
            }
            last_dir[i] = dir;
            let moved = (step[i] / h).min((t - y).abs());
            let next = (y + f64::from(dir) * moved).clamp(0.0, (len - 1) as f64);
            ys[slot] = next;
            *profile.law_mut(d).expect("checked profile") = interpolated_law(len, next);
        }
        iterations += 1;
    }
}

/// Every profile on the discretized strategy space where no degree can gain
/// more than `eps_fix` by deviating.
///
/// On the binary grid each degree mixes over `config.mixing_levels`
/// probability levels (at most 21 levels, own degrees at most 4); on finer
/// grids profiles are pure and the scan size `resolution^degrees` is charged
/// against the game's budget.
pub fn enumerate_symmetric_equilibria(game: &Game, config: &SolverConfig) -> Result<Vec<EquilibriumReport>> {
    config.validate()?;
    let degrees = game.degrees().to_vec();
    for &d in &degrees {
        for k in game.beliefs.neighbor_support(d).unwrap_or_default() {
            if !degrees.contains(&k) {
                return Err(Error::Input(format!(
                    "neighbor degree {k} is reachable but has no beliefs of its own"
                )));
            }
        }
    }
    let mixed = game.grid.is_binary();
    let levels = if mixed { config.mixing_levels } else { game.grid.len() };
    let max_degree = *degrees.last().unwrap_or(&0);
    if mixed && (max_degree > ENUMERATION_MAX_DEGREE || levels > ENUMERATION_MAX_LEVELS) {
        return Err(Error::Budget {
            context: format!(
                "mixed enumeration over own degrees up to {max_degree} (limit {ENUMERATION_MAX_DEGREE}) with {levels} mixing levels (limit {ENUMERATION_MAX_LEVELS})"
            ),
            needed: tuple_count(levels, degrees.len()),
            budget: tuple_count(ENUMERATION_MAX_LEVELS, degrees.len()),
        });
    }
    let count = tuple_count(levels, degrees.len());
    if count > game.budget {
        return Err(Error::Budget {
            context: format!("enumeration of {levels} levels over {} degrees", degrees.len()),
            needed: count,
            budget: game.budget,
        });
    }
    let last = (levels - 1) as f64;
    let mut found = Vec::new();
    let mut odo = Odometer::new(levels, degrees.len());
    while let Some(code) = odo.current() {
        let profile = if mixed {
            let probs: Vec<(usize, f64)> = degrees.iter().zip(code).map(|(&d, &c)| (d, c as f64 / last)).collect();
            StrategyProfile::binary(&probs)?
        } else {
            let acts: Vec<(usize, usize)> = degrees.iter().copied().zip(code.iter().copied()).collect();
            StrategyProfile::pure(&game.grid, &acts)?
        };
        let mut states = Vec::with_capacity(degrees.len());
        let mut stable = true;
        for &d in &degrees {
            let s = evaluate_degree(game, &profile, d, config.tie_break)?;
            if s.gain > config.eps_fix {
                stable = false;
                break;
            }
            states.push(s);
        }
        if stable {
            let residual = states.iter().map(|s| s.gain).fold(0.0, f64::max);
            found.push(build_report(
                game,
                profile,
                &states,
                SolveMethod::ExhaustiveEnumeration,
                true,
                0,
                residual,
            ));
        }
        odo.advance();
    }
    Ok(found)
}

/// A pair of degrees whose equilibrium payoffs are out of order.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffOrderFailure {
    pub report: usize,
    pub low_degree: usize,
    pub high_degree: usize,
    pub eu_low: f64,
    pub eu_high: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PayoffOrderingVerdict {
    pub checked: usize,
    /// Reports whose shape does not match the association hypothesis.
    pub skipped: Vec<(usize, &'static str)>,
    pub failures: Vec<PayoffOrderFailure>,
}

impl PayoffOrderingVerdict {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

fn payoff_order_failures(index: usize, report: &EquilibriumReport, out: &mut Vec<PayoffOrderFailure>) {
    for i in 0..report.degrees.len() {
        for j in i + 1..report.degrees.len() {
            if report.eu_star[j] < report.eu_star[i] - MONOTONE_TOL {
                out.push(PayoffOrderFailure {
                    report: index,
                    low_degree: report.degrees[i],
                    high_degree: report.degrees[j],
                    eu_low: report.eu_star[i],
                    eu_high: report.eu_star[j],
                });
            }
        }
    }
}

/// Checks that equilibrium payoffs are non-decreasing in degree for every
/// report whose shape fits the association: non-decreasing profiles under
/// positive association, non-increasing ones under negative association.
pub fn verify_payoff_ordering(reports: &[EquilibriumReport], association: AssociationVerdict) -> PayoffOrderingVerdict {
    let mut verdict = PayoffOrderingVerdict {
        checked: 0,
        skipped: Vec::new(),
        failures: Vec::new(),
    };
    for (i, r) in reports.iter().enumerate() {
        let applies = match association {
            AssociationVerdict::Positive => r.monotonicity.is_non_decreasing(),
            AssociationVerdict::Negative => r.monotonicity.is_non_increasing(),
            AssociationVerdict::Neither => {
                verdict.skipped.push((i, "beliefs are neither positively nor negatively associated"));
                continue;
            }
        };
        if !applies {
            verdict.skipped.push((
                i,
                match association {
                    AssociationVerdict::Positive => "profile is not non-decreasing under positive association",
                    _ => "profile is not non-increasing under negative association",
                },
            ));
            continue;
        }
        verdict.checked += 1;
        payoff_order_failures(i, r, &mut verdict.failures);
    }
    verdict
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeadlineVerdict {
    pub checked: usize,
    /// Reports whose actions increase somewhere in degree.
    pub action_failures: Vec<usize>,
    pub payoff_failures: Vec<PayoffOrderFailure>,
}

impl HeadlineVerdict {
    pub fn holds(&self) -> bool {
        self.action_failures.is_empty() && self.payoff_failures.is_empty()
    }
}

/// Better-connected players invest less and earn more: actions
/// non-increasing and payoffs non-decreasing in degree, in every report.
pub fn verify_headline(reports: &[EquilibriumReport]) -> HeadlineVerdict {
    let mut v = HeadlineVerdict {
        checked: reports.len(),
        action_failures: Vec::new(),
        payoff_failures: Vec::new(),
    };
    for (i, r) in reports.iter().enumerate() {
        if !r.monotonicity.is_non_increasing() {
            v.action_failures.push(i);
        }
        payoff_order_failures(i, r, &mut v.payoff_failures);
    }
    v
}
