//! Ex-post utilities and their structural checkers.
//!
//! A player investing `x` whose neighbors invest `x_1..x_d` receives
//! `f(x + λ Σ x_j) − c(x)`. The best-shot game is the special case with
//! binary actions, `λ = 1` and a step benefit, so a player is safe as soon as
//! it or any neighbor invests.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::error::{input, Error, Result};
use crate::expected_utility::ActionGrid;
use crate::seed::rng_from_seed;
use crate::tuples::{for_each_tuple, tuple_count};

/// Tolerance used when comparing utility differences.
pub const UTILITY_TOL: f64 = 1e-12;

/// Exhaustive scans are limited to this many neighbors.
pub const EXHAUSTIVE_MAX_DEGREE: usize = 3;
/// Exhaustive scans are limited to this many grid points.
pub const EXHAUSTIVE_MAX_POINTS: usize = 5;
/// Random pairs drawn when a scan exceeds the exhaustive limits.
pub const SAMPLED_PAIRS: usize = 20_000;
const SAMPLING_SEED: u64 = 0x5EC1_2E57;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BenefitFunction {
    /// `min(z, 1)`.
    LinearSaturating,
    /// `z^alpha`; concave for `alpha <= 1`, convex above.
    Power { alpha: f64 },
    /// `ln(1 + z) / ln 2`.
    Log,
    /// `0` below 1, `1` from 1 on.
    Step,
}

impl BenefitFunction {
    pub fn eval(&self, z: f64) -> f64 {
        match *self {
            BenefitFunction::LinearSaturating => z.min(1.0),
            BenefitFunction::Power { alpha } => {
                if z <= 0.0 {
                    0.0
                } else {
                    libm::pow(z, alpha)
                }
            }
            BenefitFunction::Log => libm::log1p(z) / core::f64::consts::LN_2,
            BenefitFunction::Step => {
                if z >= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            BenefitFunction::LinearSaturating => "linear-saturating",
            BenefitFunction::Power { .. } => "power",
            BenefitFunction::Log => "log",
            BenefitFunction::Step => "step",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let BenefitFunction::Power { alpha } = *self {
            if !(alpha.is_finite() && alpha > 0.0) {
                return Err(Error::Input(format!("power benefit needs alpha > 0, got {alpha}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostFunction {
    /// `c0 · x`.
    Linear { c0: f64 },
    /// `c0 · x²`.
    Quadratic { c0: f64 },
}

impl CostFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            CostFunction::Linear { c0 } => c0 * x,
            CostFunction::Quadratic { c0 } => c0 * x * x,
        }
    }

    pub fn c0(&self) -> f64 {
        match *self {
            CostFunction::Linear { c0 } | CostFunction::Quadratic { c0 } => c0,
        }
    }

    pub fn with_c0(&self, c0: f64) -> Self {
        match self {
            CostFunction::Linear { .. } => CostFunction::Linear { c0 },
            CostFunction::Quadratic { .. } => CostFunction::Quadratic { c0 },
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            CostFunction::Linear { .. } => "linear",
            CostFunction::Quadratic { .. } => "quadratic",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let c0 = self.c0();
        if !(c0.is_finite() && c0 >= 0.0) {
            return Err(Error::Input(format!("cost scale c0 must be >= 0, got {c0}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameKind {
    SumOfInvestments,
    BestShot,
}

impl GameKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GameKind::SumOfInvestments => "sum-of-investments",
            GameKind::BestShot => "best-shot",
        }
    }
}

/// Benefit, cost and externality weight of one game.
///
/// Fields are public so tests can build models outside the validated range;
/// the constructors and [`PayoffModel::validate`] enforce the usual contract.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffModel {
    pub kind: GameKind,
    pub benefit: BenefitFunction,
    pub cost: CostFunction,
    pub lambda: f64,
}

impl PayoffModel {
    pub fn sum_of_investments(benefit: BenefitFunction, cost: CostFunction, lambda: f64) -> Result<Self> {
        let m = PayoffModel {
            kind: GameKind::SumOfInvestments,
            benefit,
            cost,
            lambda,
        };
        m.validate()?;
        Ok(m)
    }

    /// Step benefit, unweighted neighbor sum, binary actions.
    pub fn best_shot(cost: CostFunction) -> Result<Self> {
        let m = PayoffModel {
            kind: GameKind::BestShot,
            benefit: BenefitFunction::Step,
            cost,
            lambda: 1.0,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.benefit.validate()?;
        self.cost.validate()?;
        if !(self.lambda.is_finite() && (0.0..=1.0).contains(&self.lambda)) {
            return Err(Error::Input(format!("lambda must lie in [0, 1], got {}", self.lambda)));
        }
        if self.kind == GameKind::BestShot
            && (self.benefit != BenefitFunction::Step || self.lambda != 1.0)
        {
            return Err(input("best-shot games use the step benefit with lambda = 1"));
        }
        Ok(())
    }

    /// Utility given the (already weighted-out) sum of neighbor actions.
    #[inline]
    pub fn utility_of_sum(&self, own: f64, neighbor_sum: f64) -> f64 {
        self.benefit.eval(own + self.lambda * neighbor_sum) - self.cost.eval(own)
    }

    /// Grid points a player may use under this model.
    pub fn admissible_points(&self, grid: &ActionGrid) -> Vec<f64> {
        match self.kind {
            GameKind::SumOfInvestments => grid.points().to_vec(),
            GameKind::BestShot => vec![0.0, 1.0],
        }
    }

    fn check_action(&self, x: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Input(format!("action {x} outside [0, 1]")));
        }
        if self.kind == GameKind::BestShot && x != 0.0 && x != 1.0 {
            return Err(Error::Input(format!("best-shot actions are 0 or 1, got {x}")));
        }
        Ok(())
    }
}

/// Ex-post utility of a player investing `own` against `neighbors`.
pub fn utility(model: &PayoffModel, own: f64, neighbors: &[f64]) -> Result<f64> {
    model.check_action(own)?;
    for &x in neighbors {
        model.check_action(x)?;
    }
    // Summing in sorted order makes the result exactly permutation invariant.
    let mut sorted = neighbors.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(model.utility_of_sum(own, sorted.iter().sum()))
}

/// How much of the action space a scan covered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanCoverage {
    Exhaustive,
    Sampled { pairs: usize },
}

/// Neighbor profiles compared by a scan, with `higher >= lower` coordinate-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalityWitness {
    pub own: f64,
    pub higher: Vec<f64>,
    pub lower: Vec<f64>,
    pub utility_higher: f64,
    pub utility_lower: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExternalityReport {
    pub holds: bool,
    pub witness: Option<ExternalityWitness>,
    pub coverage: ScanCoverage,
}

/// Visits dominated neighbor-profile pairs `(higher, lower)` over the index
/// set `0..points`, exhaustively when small and by sampling otherwise.
/// The visitor returns `false` to stop.
fn scan_dominated_pairs(
    points: usize,
    degree: usize,
    mut visit: impl FnMut(&[usize], &[usize]) -> bool,
) -> ScanCoverage {
    if degree <= EXHAUSTIVE_MAX_DEGREE && points <= EXHAUSTIVE_MAX_POINTS {
        let mut go = true;
        let mut lower = vec![0; degree];
        for_each_tuple(points, degree, |hi| {
            if !go {
                return;
            }
            // Enumerate lower <= hi coordinate-wise.
            let total = hi.iter().map(|&h| h + 1).product::<usize>();
            for mut code in 0..total {
                for (slot, &h) in lower.iter_mut().zip(hi) {
                    *slot = code % (h + 1);
                    code /= h + 1;
                }
                if !visit(hi, &lower) {
                    go = false;
                    return;
                }
            }
        });
        ScanCoverage::Exhaustive
    } else {
        let mut rng = rng_from_seed(SAMPLING_SEED);
        let mut hi = vec![0; degree];
        let mut lo = vec![0; degree];
        for _ in 0..SAMPLED_PAIRS {
            for (h, l) in hi.iter_mut().zip(lo.iter_mut()) {
                *h = rng.gen_range(0..points);
                *l = rng.gen_range(0..=*h);
            }
            if !visit(&hi, &lo) {
                break;
            }
        }
        ScanCoverage::Sampled {
            pairs: SAMPLED_PAIRS,
        }
    }
}

fn gather(points: &[f64], idx: &[usize]) -> Vec<f64> {
    idx.iter().map(|&i| points[i]).collect()
}

fn sum_at(points: &[f64], idx: &[usize]) -> f64 {
    idx.iter().map(|&i| points[i]).sum()
}

/// Checks `U(x, x⃗) >= U(x, x⃗')` whenever `x⃗ >= x⃗'` coordinate-wise.
pub fn check_positive_externality(model: &PayoffModel, degree: usize, grid: &ActionGrid) -> ExternalityReport {
    let points = model.admissible_points(grid);
    let mut witness = None;
    let coverage = scan_dominated_pairs(points.len(), degree, |hi, lo| {
        let (sh, sl) = (sum_at(&points, hi), sum_at(&points, lo));
        for &own in &points {
            let uh = model.utility_of_sum(own, sh);
            let ul = model.utility_of_sum(own, sl);
            if uh < ul - UTILITY_TOL {
                witness = Some(ExternalityWitness {
                    own,
                    higher: gather(&points, hi),
                    lower: gather(&points, lo),
                    utility_higher: uh,
                    utility_lower: ul,
                });
                return false;
            }
        }
        true
    });
    ExternalityReport {
        holds: witness.is_none(),
        witness,
        coverage,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategicInteraction {
    Complements,
    Substitutes,
    /// Differences do not depend on neighbor actions (additively separable).
    Both,
    Neither,
}

impl StrategicInteraction {
    pub fn is_complements(self) -> bool {
        matches!(self, StrategicInteraction::Complements | StrategicInteraction::Both)
    }

    pub fn is_substitutes(self) -> bool {
        matches!(self, StrategicInteraction::Substitutes | StrategicInteraction::Both)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StrategicInteraction::Complements => "complements",
            StrategicInteraction::Substitutes => "substitutes",
            StrategicInteraction::Both => "both",
            StrategicInteraction::Neither => "neither",
        }
    }
}

/// A failure of increasing (or decreasing) differences.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionWitness {
    pub own_high: f64,
    pub own_low: f64,
    pub higher: Vec<f64>,
    pub lower: Vec<f64>,
    /// `U(own_high, higher) - U(own_low, higher)`.
    pub gain_at_higher: f64,
    /// `U(own_high, lower) - U(own_low, lower)`.
    pub gain_at_lower: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InteractionReport {
    pub class: StrategicInteraction,
    /// Breaks complements (gain at higher profile is smaller).
    pub complements_witness: Option<InteractionWitness>,
    /// Breaks substitutes (gain at higher profile is larger).
    pub substitutes_witness: Option<InteractionWitness>,
    pub coverage: ScanCoverage,
}

/// Classifies increasing/decreasing differences of `U` in
/// (own action, neighbor actions) over the grid.
pub fn classify_strategic_interaction(model: &PayoffModel, degree: usize, grid: &ActionGrid) -> InteractionReport {
    let points = model.admissible_points(grid);
    let mut comp = None;
    let mut subs = None;
    let coverage = scan_dominated_pairs(points.len(), degree, |hi, lo| {
        let (sh, sl) = (sum_at(&points, hi), sum_at(&points, lo));
        for (j, &x_hi) in points.iter().enumerate() {
            for &x_lo in &points[..j] {
                let gh = model.utility_of_sum(x_hi, sh) - model.utility_of_sum(x_lo, sh);
                let gl = model.utility_of_sum(x_hi, sl) - model.utility_of_sum(x_lo, sl);
                let make = || InteractionWitness {
                    own_high: x_hi,
                    own_low: x_lo,
                    higher: gather(&points, hi),
                    lower: gather(&points, lo),
                    gain_at_higher: gh,
                    gain_at_lower: gl,
                };
                if comp.is_none() && gh < gl - UTILITY_TOL {
                    comp = Some(make());
                }
                if subs.is_none() && gh > gl + UTILITY_TOL {
                    subs = Some(make());
                }
            }
        }
        comp.is_none() || subs.is_none()
    });
    let class = match (&comp, &subs) {
        (None, None) => StrategicInteraction::Both,
        (None, Some(_)) => StrategicInteraction::Complements,
        (Some(_), None) => StrategicInteraction::Substitutes,
        (Some(_), Some(_)) => StrategicInteraction::Neither,
    };
    InteractionReport {
        class,
        complements_witness: comp,
        substitutes_witness: subs,
        coverage,
    }
}

/// Checks `U(x, (x⃗, 0)) == U(x, x⃗)` exactly on the grid: a neighbor who
/// invests nothing is the same as no neighbor. Returns a violating
/// `(own, neighbors)` if one exists.
pub fn check_link_dropping(model: &PayoffModel, degree: usize, grid: &ActionGrid) -> Result<Option<(f64, Vec<f64>)>> {
    let points = model.admissible_points(grid);
    let terms = tuple_count(points.len(), degree + 1);
    if terms > 10_000_000 {
        return Err(Error::Budget {
            context: format!("link-dropping scan at degree {degree}"),
            needed: terms,
            budget: 10_000_000,
        });
    }
    let mut bad = None;
    let mut padded = Vec::with_capacity(degree + 1);
    for_each_tuple(points.len(), degree, |idx| {
        if bad.is_some() {
            return;
        }
        padded.clear();
        padded.extend(idx.iter().map(|&i| points[i]));
        for &own in &points {
            let base = utility(model, own, &padded).unwrap_or(f64::NAN);
            padded.push(0.0);
            let with_zero = utility(model, own, &padded).unwrap_or(f64::NAN);
            padded.pop();
            if base.to_bits() != with_zero.to_bits() {
                bad = Some((own, padded.clone()));
                return;
            }
        }
    });
    Ok(bad)
}
