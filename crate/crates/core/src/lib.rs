//! Exact brute-force verification, synthesis and search for incentive-compatible,
//! individually rational and nonbossy mechanisms on finite environments.

pub mod error;
pub mod eval;
pub mod fixtures;
pub mod io;
pub mod mechanisms;
pub mod model;
pub mod rational;
pub mod synth;
pub mod verify;

pub use error::{Error, Result};
pub use mechanisms::{
    tabulate, tabulate_canonical, AnyMechanism, DecisionEntry, DecisionList, Mechanism, Offer,
    SequentialPostedPrice,
};
pub use model::{
    build_canonical_grid, enumerate_feasible_outcomes, item_profile, satisfies, Decision,
    Environment, EnvironmentKind, FeasibilityConstraint, FeasibleSet, Grid, Outcome,
    PaymentVector, TabularMechanism, Tiebreak, Valuation, ValuationProfile,
};
pub use rational::{q, Rational};
