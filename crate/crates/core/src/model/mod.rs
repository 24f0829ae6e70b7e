//! Environments, valuations, outcomes and the extensional mechanism table.

mod env;
mod feasibility;
mod grid;
mod table;
mod types;

pub use env::{Environment, EnvironmentKind, Tiebreak};
pub use feasibility::{
    enumerate_feasible_outcomes, find_closure_violation, FeasibilityConstraint, FeasibleSet,
};
pub use grid::{build_canonical_grid, canonical_environment, Grid};
pub use table::TabularMechanism;
pub use types::{
    item_profile, render_profile, satisfies, Decision, Outcome, PaymentVector, Valuation,
    ValuationProfile,
};

pub(crate) use types::satisfies_unchecked;
