//! Interim expected utility of a degree-`d` player.
//!
//! The exact path uses the fact that a player's utility depends on its
//! neighbors only through the sum of their actions. Under i.i.d. beliefs every
//! neighbor's action is drawn from the same mixture
//! `μ_d = Σ_{d'} Q[d][d'] γ(d')`, so the law of the neighbor sum is the
//! `d`-fold convolution of `μ_d` on the grid-index lattice. Joint beliefs
//! convolve the action laws of each degree tuple and mix over tuples.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::degree_model::{BeliefKind, NeighborBeliefs};
use crate::error::{input, Error, Result};
use crate::monotone::Monotonicity;
use crate::payoff::{GameKind, PayoffModel};
use crate::seed::{derive_seed, rng_from_seed, sample_categorical};

/// Default cap on the number of terms an exact evaluation may touch.
pub const DEFAULT_BUDGET: u64 = 2_000_000;

/// Tolerance for the degree complementarity inequalities.
pub const DEGREE_DIFF_TOL: f64 = 1e-10;

/// Tolerance for probability vectors inside strategy profiles.
pub const LAW_TOL: f64 = 1e-12;

/// Minimum Monte Carlo sample count.
pub const MIN_MC_SAMPLES: usize = 100;

/// Evenly spaced investment levels `0, 1/(r-1), ..., 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionGrid {
    points: Vec<f64>,
}

impl ActionGrid {
    pub fn uniform(resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(input("action grid needs at least the points 0 and 1"));
        }
        let last = (resolution - 1) as f64;
        Ok(ActionGrid {
            points: (0..resolution).map(|i| i as f64 / last).collect(),
        })
    }

    /// `{0, 1}`, the best-shot action set.
    pub fn binary() -> Self {
        ActionGrid {
            points: vec![0.0, 1.0],
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_binary(&self) -> bool {
        self.points.len() == 2
    }

    pub fn step(&self) -> f64 {
        1.0 / (self.points.len() - 1) as f64
    }

    pub fn point(&self, index: usize) -> f64 {
        self.points[index]
    }

    pub fn index_of(&self, x: f64) -> Option<usize> {
        if !(0.0..=1.0).contains(&x) {
            return None;
        }
        let i = libm::round(x * (self.points.len() - 1) as f64) as usize;
        ((self.points[i] - x).abs() <= 1e-12).then_some(i)
    }
}

/// A symmetric strategy: for each degree, a probability vector over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfile {
    grid_len: usize,
    degrees: Vec<usize>,
    laws: Vec<Vec<f64>>,
}

impl StrategyProfile {
    pub fn from_laws(grid: &ActionGrid, mut laws: Vec<(usize, Vec<f64>)>) -> Result<Self> {
        laws.sort_by_key(|(d, _)| *d);
        if laws.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(input("profile lists a degree twice"));
        }
        for (d, law) in &laws {
            if law.len() != grid.len() {
                return Err(Error::Input(format!(
                    "law for degree {d} has {} entries, grid has {}",
                    law.len(),
                    grid.len()
                )));
            }
            if law.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(Error::Input(format!("law for degree {d} has a negative entry")));
            }
            let total: f64 = law.iter().sum();
            if (total - 1.0).abs() > LAW_TOL {
                return Err(Error::Input(format!("law for degree {d} sums to {total}")));
            }
        }
        let (degrees, laws) = laws.into_iter().unzip();
        Ok(StrategyProfile {
            grid_len: grid.len(),
            degrees,
            laws,
        })
    }

    /// Point masses at the given grid indices.
    pub fn pure(grid: &ActionGrid, actions: &[(usize, usize)]) -> Result<Self> {
        let mut laws = Vec::with_capacity(actions.len());
        for &(d, i) in actions {
            if i >= grid.len() {
                return Err(Error::Input(format!("grid index {i} out of range for degree {d}")));
            }
            let mut law = vec![0.0; grid.len()];
            law[i] = 1.0;
            laws.push((d, law));
        }
        Self::from_laws(grid, laws)
    }

    pub fn constant_pure(grid: &ActionGrid, degrees: &[usize], index: usize) -> Result<Self> {
        let actions: Vec<(usize, usize)> = degrees.iter().map(|&d| (d, index)).collect();
        Self::pure(grid, &actions)
    }

    /// Binary-grid profile where degree `d` invests with probability `p`.
    pub fn binary(probs: &[(usize, f64)]) -> Result<Self> {
        let grid = ActionGrid::binary();
        let mut laws = Vec::with_capacity(probs.len());
        for &(d, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Input(format!("investment probability {p} outside [0, 1]")));
            }
            laws.push((d, vec![1.0 - p, p]));
        }
        Self::from_laws(&grid, laws)
    }

    pub fn grid_len(&self) -> usize {
        self.grid_len
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn laws(&self) -> &[Vec<f64>] {
        &self.laws
    }

    pub fn law(&self, degree: usize) -> Option<&[f64]> {
        self.degrees
            .binary_search(&degree)
            .ok()
            .map(|i| self.laws[i].as_slice())
    }

    pub(crate) fn law_mut(&mut self, degree: usize) -> Option<&mut Vec<f64>> {
        match self.degrees.binary_search(&degree) {
            Ok(i) => Some(&mut self.laws[i]),
            Err(_) => None,
        }
    }

    /// Replaces the law of one degree.
    pub fn with_law(&self, degree: usize, law: Vec<f64>) -> Result<Self> {
        let mut laws: Vec<(usize, Vec<f64>)> = self.degrees.iter().copied().zip(self.laws.iter().cloned()).collect();
        match laws.iter_mut().find(|(d, _)| *d == degree) {
            Some(slot) => slot.1 = law,
            None => laws.push((degree, law)),
        }
        let grid_len = self.grid_len;
        let mut p = Self::from_laws(&ActionGrid::uniform(grid_len)?, laws)?;
        p.grid_len = grid_len;
        Ok(p)
    }

    /// The same profile keeping only the listed degrees.
    pub fn restricted_to(&self, degrees: &[usize]) -> Self {
        let keep: Vec<usize> = (0..self.degrees.len()).filter(|&i| degrees.contains(&self.degrees[i])).collect();
        StrategyProfile {
            grid_len: self.grid_len,
            degrees: keep.iter().map(|&i| self.degrees[i]).collect(),
            laws: keep.iter().map(|&i| self.laws[i].clone()).collect(),
        }
    }

    pub fn mean_action(&self, grid: &ActionGrid, degree: usize) -> Option<f64> {
        self.law(degree)
            .map(|law| law.iter().zip(grid.points()).map(|(p, x)| p * x).sum())
    }

    /// Grid index of a point-mass law.
    pub fn pure_index(&self, degree: usize) -> Option<usize> {
        let law = self.law(degree)?;
        law.iter().position(|&p| p == 1.0)
    }

    pub fn is_pure(&self) -> bool {
        self.laws.iter().all(|l| l.contains(&1.0))
    }

    /// Monotonicity of the action law in degree under first-order
    /// stochastic dominance, comparing consecutive degrees.
    pub fn monotonicity(&self, tol: f64) -> Monotonicity {
        let mut up = true;
        let mut down = true;
        for w in self.laws.windows(2) {
            let (mut ca, mut cb) = (0.0, 0.0);
            for (a, b) in w[0].iter().zip(&w[1]) {
                ca += a;
                cb += b;
                // Higher degree dominates when its CDF lies below.
                if cb > ca + tol {
                    up = false;
                }
                if ca > cb + tol {
                    down = false;
                }
            }
        }
        Monotonicity::from_flags(up, down)
    }
}

/// One payoff model, belief family and action grid, plus the exact
/// evaluation budget.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    pub model: PayoffModel,
    pub beliefs: NeighborBeliefs,
    pub grid: ActionGrid,
    pub budget: u64,
}

/// Monte Carlo estimate of one expected-utility cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EuMethod {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EuCell {
    pub degree: usize,
    pub action: f64,
    pub value: f64,
    pub std_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedUtilityTable {
    pub method: EuMethod,
    pub cells: Vec<EuCell>,
}

impl Game {
    pub fn new(model: PayoffModel, beliefs: NeighborBeliefs, grid: ActionGrid) -> Result<Self> {
        model.validate()?;
        if model.kind == GameKind::BestShot && !grid.is_binary() {
            return Err(input("best-shot games are played on the binary grid {0, 1}"));
        }
        Ok(Game {
            model,
            beliefs,
            grid,
            budget: DEFAULT_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// Own degrees in play.
    pub fn degrees(&self) -> &[usize] {
        self.beliefs.degrees()
    }

    /// Checks that `profile` lives on this grid and covers every degree a
    /// player can meet as a neighbor.
    pub fn check_profile(&self, profile: &StrategyProfile) -> Result<()> {
        if profile.grid_len() != self.grid.len() {
            return Err(Error::Input(format!(
                "profile is defined on {} grid points, game grid has {}",
                profile.grid_len(),
                self.grid.len()
            )));
        }
        for &d in self.degrees() {
            if profile.law(d).is_none() {
                return Err(Error::Input(format!("profile has no law for degree {d}")));
            }
            for k in self.beliefs.neighbor_support(d).unwrap_or_default() {
                if profile.law(k).is_none() {
                    return Err(Error::Input(format!(
                        "profile has no law for neighbor degree {k} reachable from degree {d}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn neighbor_law<'p>(&self, profile: &'p StrategyProfile, k: usize, d: usize) -> Result<&'p [f64]> {
        profile.law(k).ok_or_else(|| {
            Error::Input(format!(
                "profile has no law for neighbor degree {k} reachable from degree {d}"
            ))
        })
    }

    /// Law of the sum of neighbor grid indices for a degree-`d` player.
    pub(crate) fn neighbor_sum_law(&self, profile: &StrategyProfile, d: usize) -> Result<Vec<f64>> {
        if profile.grid_len() != self.grid.len() {
            return Err(input("profile and game use different grids"));
        }
        let r = self.grid.len();
        let conv_terms = |d: usize| -> u64 { (0..d).map(|j| (j * (r - 1) + 1) as u64 * r as u64).sum() };
        if let Some(row) = self.beliefs.row(d) {
            let support: Vec<(usize, f64)> = row
                .iter()
                .enumerate()
                .filter(|(_, p)| **p > 0.0)
                .map(|(k, p)| (k + 1, *p))
                .collect();
            let needed = (support.len() * r) as u64 + conv_terms(d);
            self.charge(needed, d)?;
            let mut mix = vec![0.0; r];
            for &(k, q) in &support {
                for (m, g) in mix.iter_mut().zip(self.neighbor_law(profile, k, d)?) {
                    *m += q * g;
                }
            }
            let mut law = vec![1.0];
            for _ in 0..d {
                law = convolve(&law, &mix);
            }
            Ok(law)
        } else if let Some(outcomes) = self.beliefs.joint(d) {
            let needed = outcomes.len() as u64 * conv_terms(d);
            self.charge(needed, d)?;
            let mut total = vec![0.0; d * (r - 1) + 1];
            for (tuple, p) in outcomes {
                let mut law = vec![1.0];
                for &k in tuple {
                    law = convolve(&law, self.neighbor_law(profile, k, d)?);
                }
                for (t, l) in total.iter_mut().zip(&law) {
                    *t += p * l;
                }
            }
            Ok(total)
        } else {
            Err(Error::Input(format!("no beliefs held by degree {d}")))
        }
    }

    fn charge(&self, needed: u64, d: usize) -> Result<()> {
        if needed > self.budget {
            return Err(Error::Budget {
                context: format!("expected utility at degree {d}"),
                needed,
                budget: self.budget,
            });
        }
        Ok(())
    }

    fn row_from_law(&self, law: &[f64]) -> Vec<f64> {
        let h = self.grid.step();
        self.grid
            .points()
            .iter()
            .map(|&x| {
                law.iter()
                    .enumerate()
                    .filter(|(_, p)| **p > 0.0)
                    .map(|(k, p)| p * self.model.utility_of_sum(x, k as f64 * h))
                    .sum()
            })
            .collect()
    }

    /// Exact expected utility of every grid action at degree `d`.
    pub fn expected_utility_row(&self, profile: &StrategyProfile, d: usize) -> Result<Vec<f64>> {
        let law = self.neighbor_sum_law(profile, d)?;
        Ok(self.row_from_law(&law))
    }

    /// Exact `EU(x, γ, d)`; `x` must be a grid point.
    pub fn expected_utility_exact(&self, profile: &StrategyProfile, d: usize, x: f64) -> Result<f64> {
        let i = self
            .grid
            .index_of(x)
            .ok_or_else(|| Error::Input(format!("action {x} is not a grid point")))?;
        Ok(self.expected_utility_row(profile, d)?[i])
    }

    /// Sample-mean estimate of `EU(x, γ, d)` with neighbor degrees drawn from
    /// the beliefs and actions from the profile.
    pub fn expected_utility_mc(
        &self,
        profile: &StrategyProfile,
        d: usize,
        x: f64,
        samples: usize,
        seed: u64,
    ) -> Result<McEstimate> {
        if samples < MIN_MC_SAMPLES {
            return Err(Error::Input(format!("Monte Carlo needs at least {MIN_MC_SAMPLES} samples")));
        }
        if self.grid.index_of(x).is_none() {
            return Err(Error::Input(format!("action {x} is not a grid point")));
        }
        self.check_profile(profile)?;
        let points = self.grid.points();
        let mut rng = rng_from_seed(seed);
        let (mut mean, mut m2) = (0.0f64, 0.0f64);
        enum Draw<'a> {
            Row(&'a [f64]),
            Joint(&'a [(Vec<usize>, f64)], Vec<f64>),
        }
        let draw = match self.beliefs.kind() {
            BeliefKind::FullJoint => {
                let outcomes = self.beliefs.joint(d).ok_or_else(|| Error::Input(format!("no beliefs held by degree {d}")))?;
                let probs = outcomes.iter().map(|(_, p)| *p).collect();
                Draw::Joint(outcomes, probs)
            }
            _ => Draw::Row(self.beliefs.row(d).ok_or_else(|| Error::Input(format!("no beliefs held by degree {d}")))?),
        };
        for n in 1..=samples {
            let mut sum = 0.0;
            match &draw {
                Draw::Row(row) => {
                    for _ in 0..d {
                        let k = sample_categorical(row, rng.gen::<f64>()) + 1;
                        let law = profile.law(k).unwrap();
                        sum += points[sample_categorical(law, rng.gen::<f64>())];
                    }
                }
                Draw::Joint(outcomes, probs) => {
                    let t = &outcomes[sample_categorical(probs, rng.gen::<f64>())].0;
                    for &k in t {
                        let law = profile.law(k).unwrap();
                        sum += points[sample_categorical(law, rng.gen::<f64>())];
                    }
                }
            }
            let u = self.model.utility_of_sum(x, sum);
            let delta = u - mean;
            mean += delta / n as f64;
            m2 += delta * (u - mean);
        }
        let var = m2 / (samples - 1) as f64;
        Ok(McEstimate {
            estimate: mean,
            std_error: libm::sqrt(var / samples as f64),
            samples,
            seed,
        })
    }

    /// Exact table over every degree in play and every grid action.
    pub fn table_exact(&self, profile: &StrategyProfile) -> Result<ExpectedUtilityTable> {
        self.check_profile(profile)?;
        let mut cells = Vec::new();
        for &d in self.degrees() {
            let row = self.expected_utility_row(profile, d)?;
            for (&x, v) in self.grid.points().iter().zip(row) {
                cells.push(EuCell {
                    degree: d,
                    action: x,
                    value: v,
                    std_error: None,
                });
            }
        }
        Ok(ExpectedUtilityTable {
            method: EuMethod::Exact,
            cells,
        })
    }

    /// Monte Carlo table; each cell uses a seed derived from
    /// `(seed, degree, grid index)`.
    pub fn table_mc(&self, profile: &StrategyProfile, samples: usize, seed: u64) -> Result<ExpectedUtilityTable> {
        let mut cells = Vec::new();
        for &d in self.degrees() {
            for (i, &x) in self.grid.points().iter().enumerate() {
                let cell_seed = derive_seed(seed, "eu-mc", ((d as u64) << 32) | i as u64);
                let est = self.expected_utility_mc(profile, d, x, samples, cell_seed)?;
                cells.push(EuCell {
                    degree: d,
                    action: x,
                    value: est.estimate,
                    std_error: Some(est.std_error),
                });
            }
        }
        Ok(ExpectedUtilityTable {
            method: EuMethod::MonteCarlo { samples, seed },
            cells,
        })
    }
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeInteraction {
    Complements,
    Substitutes,
    Both,
    Neither,
}

impl DegreeInteraction {
    pub fn as_str(self) -> &'static str {
        match self {
            DegreeInteraction::Complements => "complements",
            DegreeInteraction::Substitutes => "substitutes",
            DegreeInteraction::Both => "both",
            DegreeInteraction::Neither => "neither",
        }
    }
}

/// A failure of one degree-difference inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeWitness {
    pub high_degree: usize,
    pub low_degree: usize,
    pub high_action: f64,
    pub low_action: f64,
    /// `EU(high_action, d) - EU(low_action, d)` at the higher degree.
    pub gain_at_high_degree: f64,
    /// The same difference at the lower degree.
    pub gain_at_low_degree: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeComplementarityReport {
    pub profile_shape: Monotonicity,
    /// Result of the increasing-differences test; `None` when the profile is
    /// not non-decreasing, so the test does not apply.
    pub complements: Option<core::result::Result<(), DegreeWitness>>,
    /// Result of the decreasing-differences test; `None` when the profile is
    /// not non-increasing.
    pub substitutes: Option<core::result::Result<(), DegreeWitness>>,
    pub class: DegreeInteraction,
}

/// Compares `EU(x,γ,d) − EU(x',γ,d)` with `EU(x,γ,d') − EU(x',γ,d')` for every
/// `x > x'` on the grid and `d > d'` in `degrees`.
///
/// The increasing-differences test requires a non-decreasing profile and the
/// decreasing-differences test a non-increasing one; a non-monotone profile is
/// a precondition error.
pub fn check_degree_complementarity(
    game: &Game,
    profile: &StrategyProfile,
    degrees: &[usize],
) -> Result<DegreeComplementarityReport> {
    game.check_profile(profile)?;
    let shape = profile.monotonicity(LAW_TOL);
    if shape == Monotonicity::NonMonotone {
        return Err(Error::Precondition(
            "degree complementarity needs a profile that is monotone in degree".into(),
        ));
    }
    let mut degrees = degrees.to_vec();
    degrees.sort_unstable();
    degrees.dedup();
    let mut rows = Vec::with_capacity(degrees.len());
    for &d in &degrees {
        rows.push(game.expected_utility_row(profile, d)?);
    }
    let points = game.grid.points();
    let scan = |want_increasing: bool| -> core::result::Result<(), DegreeWitness> {
        for (hi, &dh) in degrees.iter().enumerate() {
            for (lo, &dl) in degrees[..hi].iter().enumerate() {
                for xi in 0..points.len() {
                    for xj in 0..xi {
                        let gh = rows[hi][xi] - rows[hi][xj];
                        let gl = rows[lo][xi] - rows[lo][xj];
                        let ok = if want_increasing {
                            gh >= gl - DEGREE_DIFF_TOL
                        } else {
                            gh <= gl + DEGREE_DIFF_TOL
                        };
                        if !ok {
                            return Err(DegreeWitness {
                                high_degree: dh,
                                low_degree: dl,
                                high_action: points[xi],
                                low_action: points[xj],
                                gain_at_high_degree: gh,
                                gain_at_low_degree: gl,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    };
    let complements = shape.is_non_decreasing().then(|| scan(true));
    let substitutes = shape.is_non_increasing().then(|| scan(false));
    let holds = |r: &Option<core::result::Result<(), DegreeWitness>>| matches!(r, Some(Ok(())));
    let class = match (holds(&complements), holds(&substitutes)) {
        (true, true) => DegreeInteraction::Both,
        (true, false) => DegreeInteraction::Complements,
        (false, true) => DegreeInteraction::Substitutes,
        (false, false) => DegreeInteraction::Neither,
    };
    Ok(DegreeComplementarityReport {
        profile_shape: shape,
        complements,
        substitutes,
        class,
    })
}
