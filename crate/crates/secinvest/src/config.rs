//! Experiment configuration files (TOML).
//!
//! Unknown keys are rejected. Everything is validated against the core
//! preconditions before any computation starts.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use secinvest_core::degree_model::DEFAULT_JOINT_MAX_DEGREE;
use secinvest_core::expected_utility::DEFAULT_BUDGET;
use secinvest_core::{
    ActionGrid, AssortativityTarget, BenefitFunction, CostFunction, DegreeDistribution,
    NeighborBeliefs, PayoffModel, SolverConfig, TieBreak,
};

use crate::error::AppError;

/// Largest root seed a config file can hold.
pub const MAX_SEED: u64 = i64::MAX as u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Solve,
    Enumerate,
    AssociationAudit,
    LemmaSuite,
    ExpostValidate,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Solve => "solve",
            ExperimentKind::Enumerate => "enumerate",
            ExperimentKind::AssociationAudit => "association-audit",
            ExperimentKind::LemmaSuite => "lemma-suite",
            ExperimentKind::ExpostValidate => "expost-validate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payoff: Option<PayoffSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beliefs: Option<BeliefSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSpec>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub association: AssociationSpec,
    #[serde(default)]
    pub expost: ExpostSpec,
    #[serde(default)]
    pub suite: SuiteSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameSpec {
    SumOfInvestments,
    BestShot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenefitSpec {
    LinearSaturating,
    Power,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CostSpec {
    #[default]
    Linear,
    Quadratic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PayoffSpec {
    pub game: GameSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub benefit: Option<BenefitSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub cost: CostSpec,
    pub c0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowSpec {
    pub degree: usize,
    /// `probs[k]` is the probability of neighbor degree `k + 1`.
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeSpec {
    pub degrees: Vec<usize>,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointSpec {
    pub degree: usize,
    pub outcomes: Vec<OutcomeSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BeliefSpec {
    Independent {
        row: Vec<f64>,
        degrees: Vec<usize>,
    },
    ConditionalIid {
        rows: Vec<RowSpec>,
    },
    Regular {
        degree: usize,
    },
    FullJoint {
        laws: Vec<JointSpec>,
        #[serde(default = "default_joint_max")]
        joint_max_degree: usize,
    },
    /// Estimated from a graph sampled per the `[graph]` section.
    Graph,
}

fn default_joint_max() -> usize {
    DEFAULT_JOINT_MAX_DEGREE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    /// `degree_law[k]` is the probability of degree `k`.
    pub degree_law: Vec<f64>,
    pub n: usize,
    #[serde(default)]
    pub r_target: f64,
    #[serde(default = "default_rewiring")]
    pub rewiring_budget: u64,
}

fn default_rewiring() -> u64 {
    200_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Number of grid points on `[0, 1]`; best-shot games always use 2.
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

fn default_resolution() -> usize {
    21
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            resolution: default_resolution(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreakSpec {
    #[default]
    SmallestAction,
    LargestAction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default = "default_damping")]
    pub damping: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default)]
    pub tie_break: TieBreakSpec,
    #[serde(default = "default_eps")]
    pub eps_fix: f64,
    #[serde(default = "default_levels")]
    pub mixing_levels: usize,
    /// Named starting profiles: any of `zero`, `one`, `half`.
    #[serde(default = "default_starts")]
    pub starts: Vec<String>,
    #[serde(default = "default_random_starts")]
    pub random_starts: usize,
    #[serde(default = "default_budget")]
    pub budget: u64,
}

fn default_damping() -> f64 {
    0.5
}
fn default_max_iterations() -> usize {
    10_000
}
fn default_eps() -> f64 {
    1e-9
}
fn default_levels() -> usize {
    21
}
fn default_starts() -> Vec<String> {
    vec!["zero".into(), "one".into(), "half".into()]
}
fn default_random_starts() -> usize {
    2
}
fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec {
            damping: default_damping(),
            max_iterations: default_max_iterations(),
            tie_break: TieBreakSpec::default(),
            eps_fix: default_eps(),
            mixing_levels: default_levels(),
            starts: default_starts(),
            random_starts: default_random_starts(),
            budget: default_budget(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssociationSpec {
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_functions")]
    pub functions: usize,
}

fn default_m() -> usize {
    1
}
fn default_functions() -> usize {
    64
}

impl Default for AssociationSpec {
    fn default() -> Self {
        AssociationSpec {
            m: default_m(),
            functions: default_functions(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpostSpec {
    #[serde(default = "default_trials")]
    pub trials: usize,
}

fn default_trials() -> usize {
    200
}

impl Default for ExpostSpec {
    fn default() -> Self {
        ExpostSpec {
            trials: default_trials(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSpec {
    #[serde(default = "default_ordering")]
    pub ordering_instances: usize,
    #[serde(default = "default_best_shot")]
    pub best_shot_instances: usize,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

fn default_ordering() -> usize {
    60
}
fn default_best_shot() -> usize {
    24
}

impl Default for SuiteSpec {
    fn default() -> Self {
        SuiteSpec {
            ordering_instances: default_ordering(),
            best_shot_instances: default_best_shot(),
            resolution: default_resolution(),
        }
    }
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> AppError {
    AppError::Validation(format!("{field}: {msg}"))
}

fn wrap<T>(field: &str, r: secinvest_core::Result<T>) -> Result<T, AppError> {
    r.map_err(|e| match e {
        secinvest_core::Error::Budget { .. } => AppError::Budget(format!("{field}: {e}")),
        other => invalid(field, other),
    })
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, AppError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| AppError::Validation(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks every section the experiment uses.
    pub fn validate(&self) -> Result<(), AppError> {
        if self.seed > MAX_SEED {
            return Err(invalid("seed", format!("must be at most {MAX_SEED} (TOML integers are signed)")));
        }
        let needs_payoff = matches!(
            self.experiment,
            ExperimentKind::Solve | ExperimentKind::Enumerate | ExperimentKind::ExpostValidate
        );
        let needs_beliefs = matches!(
            self.experiment,
            ExperimentKind::Solve | ExperimentKind::Enumerate | ExperimentKind::AssociationAudit
        );
        if needs_payoff {
            self.model()?;
            self.grid()?;
        }
        if needs_beliefs && self.beliefs.is_none() {
            return Err(invalid("beliefs", "section is required for this experiment"));
        }
        if self.experiment == ExperimentKind::ExpostValidate && self.graph.is_none() {
            return Err(invalid("graph", "section is required for expost-validate"));
        }
        if matches!(self.beliefs, Some(BeliefSpec::Graph)) && self.graph.is_none() {
            return Err(invalid("graph", "section is required when beliefs.kind = \"graph\""));
        }
        if let Some(b) = &self.beliefs {
            if !matches!(b, BeliefSpec::Graph) {
                self.explicit_beliefs()?;
            }
        }
        if let Some(g) = &self.graph {
            self.graph_target()?;
            if g.n < 2 {
                return Err(invalid("graph.n", "must be at least 2"));
            }
        }
        self.solver_config()?;
        for s in &self.solver.starts {
            if !matches!(s.as_str(), "zero" | "one" | "half") {
                return Err(invalid("solver.starts", format!("unknown start {s:?} (expected zero, one or half)")));
            }
        }
        if self.solver.starts.is_empty() && self.solver.random_starts == 0 {
            return Err(invalid("solver.starts", "need at least one starting profile"));
        }
        if self.association.m == 0 {
            return Err(invalid("association.m", "must be at least 1"));
        }
        if self.association.functions == 0 {
            return Err(invalid("association.functions", "must be at least 1"));
        }
        if self.expost.trials < 2 {
            return Err(invalid("expost.trials", "must be at least 2"));
        }
        if self.suite.resolution < 2 {
            return Err(invalid("suite.resolution", "must be at least 2"));
        }
        Ok(())
    }

    pub fn model(&self) -> Result<PayoffModel, AppError> {
        let p = self.payoff.as_ref().ok_or_else(|| invalid("payoff", "section is required for this experiment"))?;
        if !(p.c0.is_finite() && p.c0 >= 0.0) {
            return Err(invalid("payoff.c0", format!("must be a non-negative number, got {}", p.c0)));
        }
        let cost = match p.cost {
            CostSpec::Linear => CostFunction::Linear { c0: p.c0 },
            CostSpec::Quadratic => CostFunction::Quadratic { c0: p.c0 },
        };
        match p.game {
            GameSpec::BestShot => {
                if p.benefit.is_some() || p.alpha.is_some() {
                    return Err(invalid("payoff.benefit", "best-shot games use the step benefit; omit benefit and alpha"));
                }
                if let Some(l) = p.lambda {
                    if l != 1.0 {
                        return Err(invalid("payoff.lambda", format!("best-shot games fix lambda = 1, got {l}")));
                    }
                }
                wrap("payoff", PayoffModel::best_shot(cost))
            }
            GameSpec::SumOfInvestments => {
                let lambda = p.lambda.ok_or_else(|| invalid("payoff.lambda", "is required"))?;
                if !(0.0..=1.0).contains(&lambda) {
                    return Err(invalid("payoff.lambda", format!("must lie in [0, 1], got {lambda}")));
                }
                let benefit = match p.benefit.ok_or_else(|| invalid("payoff.benefit", "is required"))? {
                    BenefitSpec::LinearSaturating => BenefitFunction::LinearSaturating,
                    BenefitSpec::Log => BenefitFunction::Log,
                    BenefitSpec::Power => {
                        let alpha = p.alpha.ok_or_else(|| invalid("payoff.alpha", "is required for the power benefit"))?;
                        if !(alpha.is_finite() && alpha > 0.0) {
                            return Err(invalid("payoff.alpha", format!("must be positive, got {alpha}")));
                        }
                        BenefitFunction::Power { alpha }
                    }
                };
                if p.alpha.is_some() && !matches!(p.benefit, Some(BenefitSpec::Power)) {
                    return Err(invalid("payoff.alpha", "only applies to the power benefit"));
                }
                wrap("payoff", PayoffModel::sum_of_investments(benefit, cost, lambda))
            }
        }
    }

    pub fn grid(&self) -> Result<ActionGrid, AppError> {
        if matches!(self.payoff.as_ref().map(|p| p.game), Some(GameSpec::BestShot)) {
            return Ok(ActionGrid::binary());
        }
        wrap("grid.resolution", ActionGrid::uniform(self.grid.resolution))
    }

    /// Beliefs written out in the config (not estimated from a graph).
    pub fn explicit_beliefs(&self) -> Result<NeighborBeliefs, AppError> {
        let spec = self.beliefs.as_ref().ok_or_else(|| invalid("beliefs", "section is required"))?;
        match spec {
            BeliefSpec::Independent { row, degrees } => {
                wrap("beliefs", NeighborBeliefs::independent(row.clone(), degrees.clone()))
            }
            BeliefSpec::ConditionalIid { rows } => wrap(
                "beliefs.rows",
                NeighborBeliefs::conditional_iid(rows.iter().map(|r| (r.degree, r.probs.clone())).collect()),
            ),
            BeliefSpec::Regular { degree } => wrap("beliefs.degree", NeighborBeliefs::regular(*degree)),
            BeliefSpec::FullJoint { laws, joint_max_degree } => wrap(
                "beliefs.laws",
                NeighborBeliefs::full_joint(
                    laws.iter()
                        .map(|l| (l.degree, l.outcomes.iter().map(|o| (o.degrees.clone(), o.p)).collect()))
                        .collect(),
                    *joint_max_degree,
                ),
            ),
            BeliefSpec::Graph => Err(invalid("beliefs.kind", "graph beliefs are estimated at run time")),
        }
    }

    pub fn graph_target(&self) -> Result<AssortativityTarget, AppError> {
        let g = self.graph.as_ref().ok_or_else(|| invalid("graph", "section is required"))?;
        let law = wrap("graph.degree_law", DegreeDistribution::new(g.degree_law.clone()))?;
        if !(-1.0..=1.0).contains(&g.r_target) {
            return Err(invalid("graph.r_target", format!("must lie in [-1, 1], got {}", g.r_target)));
        }
        Ok(AssortativityTarget {
            law,
            r_target: g.r_target,
            rewiring_budget: g.rewiring_budget,
        })
    }

    pub fn solver_config(&self) -> Result<SolverConfig, AppError> {
        let s = &self.solver;
        let cfg = SolverConfig {
            damping: s.damping,
            max_iterations: s.max_iterations,
            tie_break: match s.tie_break {
                TieBreakSpec::SmallestAction => TieBreak::SmallestAction,
                TieBreakSpec::LargestAction => TieBreak::LargestAction,
            },
            eps_fix: s.eps_fix,
            mixing_levels: s.mixing_levels,
        };
        wrap("solver", cfg.validate())?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SOLVE: &str = r#"
experiment = "solve"
seed = 7

[payoff]
game = "best-shot"
c0 = 0.25

[beliefs]
kind = "regular"
degree = 2
"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = ExperimentConfig::from_toml(SOLVE).unwrap();
        assert_eq!(cfg.experiment, ExperimentKind::Solve);
        assert_eq!(cfg.solver.damping, 0.5);
        let again = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = SOLVE.replace("c0 = 0.25", "c0 = 0.25\ncost_typo = 1");
        let err = ExperimentConfig::from_toml(&text).unwrap_err().to_string();
        assert!(err.contains("cost_typo"), "{err}");
        let text = SOLVE.replace("degree = 2", "degree = 2\nextra = 3");
        assert!(ExperimentConfig::from_toml(&text).unwrap_err().to_string().contains("extra"));
    }

    #[test]
    fn negative_lambda_names_the_field() {
        let text = r#"
experiment = "solve"
[payoff]
game = "sum-of-investments"
benefit = "log"
c0 = 0.5
lambda = -0.5
[beliefs]
kind = "regular"
degree = 2
"#;
        let err = ExperimentConfig::from_toml(text).unwrap_err();
        assert!(matches!(err, AppError::Validation(_)));
        assert!(err.to_string().contains("payoff.lambda"), "{err}");
    }

    #[test]
    fn beliefs_are_checked_up_front() {
        let text = SOLVE.replace("kind = \"regular\"\ndegree = 2", "kind = \"independent\"\nrow = [0.5, 0.6]\ndegrees = [1, 2]");
        let err = ExperimentConfig::from_toml(&text).unwrap_err().to_string();
        assert!(err.starts_with("beliefs"), "{err}");
    }
}
