//! Intensional mechanisms and the two constructive ones (full extraction and log-r).

mod decision_list;
mod full_extraction;
mod log_r;
mod posted_price;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{render_profile, Decision, Environment, Grid, TabularMechanism, ValuationProfile};
use crate::rational::Rational;

pub use decision_list::{DecisionEntry, DecisionList};
pub(crate) use decision_list::firing_from;
pub use full_extraction::build_full_extraction_list;
pub use log_r::{build_log_r_mechanism, LogRCase, LogRPlan};
pub use posted_price::{Offer, SequentialPostedPrice};

/// Anything that maps a reported profile to an outcome and payments.
pub trait Mechanism: Sync {
    fn evaluate(&self, profile: &ValuationProfile) -> Result<Decision>;

    /// Per-agent prices the mechanism can charge; these extend canonical grids.
    fn price_atoms(&self) -> Vec<Vec<Rational>>;

    /// Structural check against an environment.
    fn validate(&self, env: &Environment) -> Result<()>;
}

impl Mechanism for DecisionList {
    fn evaluate(&self, profile: &ValuationProfile) -> Result<Decision> {
        DecisionList::evaluate(self, profile)
    }
    fn price_atoms(&self) -> Vec<Vec<Rational>> {
        DecisionList::price_atoms(self)
    }
    fn validate(&self, env: &Environment) -> Result<()> {
        DecisionList::validate(self, env)
    }
}

impl Mechanism for SequentialPostedPrice {
    fn evaluate(&self, profile: &ValuationProfile) -> Result<Decision> {
        SequentialPostedPrice::evaluate(self, profile)
    }
    fn price_atoms(&self) -> Vec<Vec<Rational>> {
        SequentialPostedPrice::price_atoms(self)
    }
    fn validate(&self, env: &Environment) -> Result<()> {
        SequentialPostedPrice::validate(self, env)
    }
}

impl Mechanism for TabularMechanism {
    fn evaluate(&self, profile: &ValuationProfile) -> Result<Decision> {
        self.lookup(profile).cloned().ok_or_else(|| {
            Error::GridExtension(format!(
                "profile {} is not on the table's grid {}",
                render_profile(profile),
                self.grid().describe()
            ))
        })
    }
    fn price_atoms(&self) -> Vec<Vec<Rational>> {
        TabularMechanism::price_atoms(self)
    }
    fn validate(&self, env: &Environment) -> Result<()> {
        if env.n_agents() != self.n_agents() {
            return Err(Error::structural(format!(
                "table has {} agents, environment {}",
                self.n_agents(),
                env.n_agents()
            )));
        }
        Ok(())
    }
}

/// Intensional mechanisms in their JSON form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum AnyMechanism {
    DecisionList(DecisionList),
    PostedPrice(SequentialPostedPrice),
}

impl Mechanism for AnyMechanism {
    fn evaluate(&self, profile: &ValuationProfile) -> Result<Decision> {
        match self {
            AnyMechanism::DecisionList(m) => m.evaluate(profile),
            AnyMechanism::PostedPrice(m) => m.evaluate(profile),
        }
    }
    fn price_atoms(&self) -> Vec<Vec<Rational>> {
        match self {
            AnyMechanism::DecisionList(m) => m.price_atoms(),
            AnyMechanism::PostedPrice(m) => m.price_atoms(),
        }
    }
    fn validate(&self, env: &Environment) -> Result<()> {
        match self {
            AnyMechanism::DecisionList(m) => Mechanism::validate(m, env),
            AnyMechanism::PostedPrice(m) => Mechanism::validate(m, env),
        }
    }
}

/// Evaluate `mech` at every profile of `grid`.
pub fn tabulate<M: Mechanism + ?Sized>(mech: &M, env: &Environment, grid: &Grid) -> Result<TabularMechanism> {
    mech.validate(env)?;
    let rows = (0..grid.len())
        .into_par_iter()
        .map(|idx| mech.evaluate(&grid.profile(idx)))
        .collect::<Result<Vec<_>>>()?;
    TabularMechanism::new(env, grid.clone(), rows)
}

/// Tabulate over the canonical grid of `mech`'s own price atoms.
pub fn tabulate_canonical<M: Mechanism + ?Sized>(mech: &M, env: &Environment) -> Result<TabularMechanism> {
    let grid = crate::model::build_canonical_grid(env, &mech.price_atoms())?;
    tabulate(mech, env, &grid)
}
