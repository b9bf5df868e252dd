//! Degree-contingent equilibrium investment for symmetric Bayesian
//! security games on networks.
//!
//! Players know their own degree and hold beliefs about their neighbors'
//! degrees. Each chooses an investment on a discretized grid in `[0, 1]`;
//! a neighbor's investment spills over as a positive externality. This crate
//! computes interim expected utilities, best responses and symmetric
//! equilibria, and provides the checkers used to audit monotonicity and
//! payoff-ordering properties of those equilibria.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, config parsing
//! and the command line live in the `secinvest` companion crate.
#![no_std]

extern crate alloc;

pub mod degree_model;
pub mod equilibrium;
pub mod error;
pub mod expected_utility;
pub mod graph_sim;
pub mod monotone;
pub mod payoff;
pub mod seed;
mod tuples;

pub use degree_model::{
    check_association, generate_monotone_test_functions, subset_expectation, AssociationReport,
    AssociationTest, AssociationVerdict, BeliefKind, DegreeDistribution, MonotoneTable,
    NeighborBeliefs,
};
pub use equilibrium::{
    best_response, enumerate_symmetric_equilibria, solve_symmetric_bne, verify_headline,
    verify_payoff_ordering, EquilibriumReport, SolveMethod, SolverConfig, TieBreak,
};
pub use error::{Error, Result};
pub use expected_utility::{ActionGrid, ExpectedUtilityTable, Game, StrategyProfile};
pub use graph_sim::{
    empirical_beliefs, expost_payoffs, k_hop_neighborhood, sample_graph, AssortativityTarget,
    GraphInstance, HopSemantics,
};
pub use monotone::Monotonicity;
pub use payoff::{BenefitFunction, CostFunction, GameKind, PayoffModel};
