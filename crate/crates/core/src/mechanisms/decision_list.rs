use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    render_profile, satisfies_unchecked, Decision, Environment, Outcome, PaymentVector,
    ValuationProfile,
};
use crate::rational::Rational;

/// One entry of a decision list: post `prices` for `outcome`, unless some
/// outcome in the exception set is also satisfied.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionEntry {
    pub outcome: Outcome,
    pub prices: PaymentVector,
    /// Indices of other entries of the same list.
    #[serde(default)]
    pub exceptions: Vec<usize>,
}

impl DecisionEntry {
    pub fn new(outcome: Outcome, prices: PaymentVector) -> Self {
        DecisionEntry {
            outcome,
            prices,
            exceptions: Vec::new(),
        }
    }

    pub fn with_exceptions(mut self, exceptions: Vec<usize>) -> Self {
        self.exceptions = exceptions;
        self
    }
}

/// Decision list with exception lists over a single-parameter environment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawDecisionList")]
pub struct DecisionList {
    entries: Vec<DecisionEntry>,
    /// Claimed, not certified; see `certify_order_oblivious`.
    #[serde(default)]
    order_oblivious: bool,
}

#[derive(Deserialize)]
struct RawDecisionList {
    entries: Vec<DecisionEntry>,
    #[serde(default)]
    order_oblivious: bool,
}

impl TryFrom<RawDecisionList> for DecisionList {
    type Error = Error;
    fn try_from(raw: RawDecisionList) -> Result<Self> {
        let mut dl = DecisionList::new(raw.entries)?;
        dl.order_oblivious = raw.order_oblivious;
        Ok(dl)
    }
}

impl DecisionList {
    pub fn new(entries: Vec<DecisionEntry>) -> Result<Self> {
        let n = entries.first().map(|e| e.outcome.len()).unwrap_or(0);
        let mut seen = BTreeSet::new();
        for (j, e) in entries.iter().enumerate() {
            let path = format!("entries[{j}]");
            if e.outcome.len() != n || e.prices.len() != n {
                return Err(Error::validation(path, format!("expected {n} coordinates")));
            }
            if !seen.insert(e.outcome.clone()) {
                return Err(Error::validation(path, format!("outcome {} listed twice", e.outcome)));
            }
            for i in 0..n {
                let p = e.prices.get(i);
                if p.is_negative() {
                    return Err(Error::validation(format!("{path}.prices[{i}]"), "negative price"));
                }
                if e.outcome.get(i) > 1 {
                    return Err(Error::validation(format!("{path}.outcome"), "outcomes must be 0/1"));
                }
                if e.outcome.get(i) == 0 && !p.is_zero() {
                    return Err(Error::validation(
                        format!("{path}.prices[{i}]"),
                        "agents not receiving an item must have price 0",
                    ));
                }
            }
            for &x in &e.exceptions {
                if x >= entries.len() {
                    return Err(Error::validation(
                        format!("{path}.exceptions"),
                        format!("exception index {x} out of range"),
                    ));
                }
            }
        }
        Ok(DecisionList {
            entries,
            order_oblivious: false,
        })
    }

    /// Mark the list as claimed order-oblivious.
    pub fn claim_order_oblivious(mut self, claim: bool) -> Self {
        self.order_oblivious = claim;
        self
    }

    pub fn order_oblivious(&self) -> bool {
        self.order_oblivious
    }

    pub fn entries(&self) -> &[DecisionEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn n_agents(&self) -> usize {
        self.entries.first().map(|e| e.outcome.len()).unwrap_or(0)
    }

    pub fn position(&self, outcome: &Outcome) -> Option<usize> {
        self.entries.iter().position(|e| &e.outcome == outcome)
    }

    pub fn validate(&self, env: &Environment) -> Result<()> {
        env.require_single_parameter("decision list")?;
        if self.n_agents() != env.n_agents() {
            return Err(Error::structural(format!(
                "decision list has {} agents, environment {}",
                self.n_agents(),
                env.n_agents()
            )));
        }
        for (j, e) in self.entries.iter().enumerate() {
            if !env.feasible().contains(&e.outcome) {
                return Err(Error::validation(
                    format!("entries[{j}].outcome"),
                    format!("outcome {} is not feasible", e.outcome),
                ));
            }
        }
        Ok(())
    }

    fn check_arity(&self, profile: &ValuationProfile) -> Result<()> {
        if profile.len() != self.n_agents() {
            return Err(Error::structural(format!(
                "profile has {} agents, list {}",
                profile.len(),
                self.n_agents()
            )));
        }
        Ok(())
    }

    /// Which entries `profile` satisfies.
    pub fn satisfied(&self, profile: &ValuationProfile) -> Result<Vec<bool>> {
        self.check_arity(profile)?;
        Ok(self
            .entries
            .iter()
            .map(|e| satisfies_unchecked(profile, &e.outcome, &e.prices))
            .collect())
    }

    /// Entries that fire: satisfied, with no satisfied exception.
    pub fn firing(&self, profile: &ValuationProfile) -> Result<Vec<usize>> {
        let sat = self.satisfied(profile)?;
        Ok(firing_from(&self.entries, &sat))
    }

    /// First firing entry in list order.
    pub fn evaluate(&self, profile: &ValuationProfile) -> Result<Decision> {
        let sat = self.satisfied(profile)?;
        let j = (0..self.entries.len())
            .find(|&j| fires(&self.entries, j, &sat))
            .ok_or_else(|| Error::IncompleteList {
                profile: render_profile(profile),
            })?;
        let e = &self.entries[j];
        Ok(Decision::new(e.outcome.clone(), e.prices.clone()))
    }

    pub fn price_atoms(&self) -> Vec<Vec<Rational>> {
        let n = self.n_agents();
        let mut sets = vec![BTreeSet::new(); n];
        for e in &self.entries {
            for (i, set) in sets.iter_mut().enumerate() {
                if e.outcome.get(i) == 1 {
                    set.insert(e.prices.get(i));
                }
            }
        }
        sets.into_iter().map(|s| s.into_iter().collect()).collect()
    }
}

fn fires(entries: &[DecisionEntry], j: usize, sat: &[bool]) -> bool {
    sat[j] && entries[j].exceptions.iter().all(|&x| !sat[x])
}

pub(crate) fn firing_from(entries: &[DecisionEntry], sat: &[bool]) -> Vec<usize> {
    (0..entries.len()).filter(|&j| fires(entries, j, sat)).collect()
}
