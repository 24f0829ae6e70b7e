use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{Decision, Environment, Grid, Outcome, Valuation};
use crate::rational::Rational;

/// A mechanism given extensionally: one decision per grid profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TabularMechanism {
    env: Environment,
    grid: Grid,
    rows: Vec<Decision>,
}

impl TabularMechanism {
    /// Build a table over `grid`; the environment's valuation space is replaced by the grid.
    pub fn new(env: &Environment, grid: Grid, rows: Vec<Decision>) -> Result<Self> {
        if grid.n_agents() != env.n_agents() {
            return Err(Error::structural(format!(
                "grid has {} agents, environment {}",
                grid.n_agents(),
                env.n_agents()
            )));
        }
        if rows.len() != grid.len() {
            return Err(Error::validation(
                "rows",
                format!("table has {} rows but the grid has {} profiles", rows.len(), grid.len()),
            ));
        }
        let n = env.n_agents();
        for (k, row) in rows.iter().enumerate() {
            if row.outcome.len() != n || row.payments.len() != n {
                return Err(Error::validation(format!("rows[{k}]"), "wrong number of coordinates"));
            }
            if !env.feasible().contains(&row.outcome) {
                return Err(Error::validation(
                    format!("rows[{k}].outcome"),
                    format!("outcome {} is not feasible", row.outcome),
                ));
            }
            if row.payments.0.iter().any(Rational::is_negative) {
                return Err(Error::validation(format!("rows[{k}].payments"), "negative payment"));
            }
        }
        let env = env.with_types(grid.all_types().to_vec());
        Ok(TabularMechanism { env, grid, rows })
    }

    /// Table over the environment's own valuation space.
    pub fn over_env(env: &Environment, rows: Vec<Decision>) -> Result<Self> {
        TabularMechanism::new(env, Grid::from_env(env), rows)
    }

    pub fn env(&self) -> &Environment {
        &self.env
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn rows(&self) -> &[Decision] {
        &self.rows
    }

    pub fn n_agents(&self) -> usize {
        self.env.n_agents()
    }

    pub fn row(&self, index: usize) -> &Decision {
        &self.rows[index]
    }

    pub fn lookup(&self, profile: &[Valuation]) -> Option<&Decision> {
        self.grid.locate(profile).map(|i| &self.rows[i])
    }

    /// Distinct outcomes appearing in the table, sorted.
    pub fn outcome_image(&self) -> BTreeSet<Outcome> {
        self.rows.iter().map(|r| r.outcome.clone()).collect()
    }

    /// Distinct (outcome, payments) pairs appearing in the table.
    pub fn image(&self) -> BTreeSet<Decision> {
        self.rows.iter().cloned().collect()
    }

    /// Every price any agent is charged, per agent (used to extend grids).
    pub fn price_atoms(&self) -> Vec<Vec<Rational>> {
        let n = self.n_agents();
        let mut sets = vec![BTreeSet::new(); n];
        for row in &self.rows {
            for (i, p) in row.payments.0.iter().enumerate() {
                sets[i].insert(*p);
            }
        }
        sets.into_iter().map(|s| s.into_iter().collect()).collect()
    }
}
