//! Feasible outcome families and downward-closed constraints.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Outcome;

/// How a feasible family is described before enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case")]
pub enum FeasibilityConstraint {
    /// Explicit list of 0/1 vectors.
    Explicit { outcomes: Vec<Outcome> },
    /// At most `k` of `n` agents receive an item.
    KUniform { n: usize, k: usize },
    /// Winners must all lie inside one group.
    Partition { groups: Vec<Vec<usize>> },
    /// Every 0/1 vector over `n` agents.
    Unconstrained { n: usize },
}

/// A validated feasible outcome set in canonical (sorted) order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibleSet {
    outcomes: Vec<Outcome>,
    index: BTreeSet<Outcome>,
    rank: usize,
}

impl FeasibleSet {
    /// Wrap an arbitrary outcome family without downward-closure checks
    /// (common-outcome environments).
    pub fn from_outcomes(outcomes: impl IntoIterator<Item = Outcome>) -> Self {
        let index: BTreeSet<Outcome> = outcomes.into_iter().collect();
        let rank = index.iter().map(Outcome::weight).max().unwrap_or(0);
        FeasibleSet {
            outcomes: index.iter().cloned().collect(),
            index,
            rank,
        }
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn contains(&self, o: &Outcome) -> bool {
        self.index.contains(o)
    }

    /// Largest number of simultaneous winners.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn n_agents(&self) -> usize {
        self.outcomes.first().map(Outcome::len).unwrap_or(0)
    }

    /// True when every feasible outcome gives at most one item (the single-item setting).
    pub fn is_single_item(&self) -> bool {
        self.rank <= 1
    }
}

/// First violation of downward closure, if any. Checking single-coordinate
/// drops suffices: every dominated vector is reached by a chain of them.
pub fn find_closure_violation(set: &FeasibleSet) -> Option<(Outcome, Outcome)> {
    for o in set.outcomes() {
        for i in o.winners().collect::<Vec<_>>() {
            let mut lower = o.clone();
            lower.0[i] = 0;
            if !set.contains(&lower) {
                return Some((o.clone(), lower));
            }
        }
    }
    None
}

/// Enumerate the 0/1 outcomes of a downward-closed family and verify closure.
pub fn enumerate_feasible_outcomes(constraint: &FeasibilityConstraint) -> Result<FeasibleSet> {
    let outcomes: Vec<Outcome> = match constraint {
        FeasibilityConstraint::Explicit { outcomes } => {
            let n = outcomes.first().map(Outcome::len).unwrap_or(0);
            for (k, o) in outcomes.iter().enumerate() {
                if o.len() != n {
                    return Err(Error::validation(
                        format!("feasible[{k}]"),
                        format!("expected {n} coordinates, found {}", o.len()),
                    ));
                }
                if o.0.iter().any(|&c| c > 1) {
                    return Err(Error::validation(
                        format!("feasible[{k}]"),
                        "single-parameter outcomes must be 0/1 vectors",
                    ));
                }
            }
            outcomes.clone()
        }
        FeasibilityConstraint::KUniform { n, k } => all_binary(*n)
            .into_iter()
            .filter(|o| o.weight() <= *k)
            .collect(),
        FeasibilityConstraint::Unconstrained { n } => all_binary(*n),
        FeasibilityConstraint::Partition { groups } => {
            let n: usize = groups.iter().map(Vec::len).sum();
            let mut seen = vec![false; n];
            for (g, group) in groups.iter().enumerate() {
                for &a in group {
                    if a >= n || seen[a] {
                        return Err(Error::validation(
                            format!("groups[{g}]"),
                            format!("groups must partition agents 0..{n}; agent {a} invalid or repeated"),
                        ));
                    }
                    seen[a] = true;
                }
            }
            all_binary(n)
                .into_iter()
                .filter(|o| {
                    groups
                        .iter()
                        .any(|g| o.winners().all(|w| g.contains(&w)))
                })
                .collect()
        }
    };
    if outcomes.is_empty() {
        return Err(Error::validation("feasible", "feasible family is empty"));
    }
    let set = FeasibleSet::from_outcomes(outcomes);
    if let Some((member, missing)) = find_closure_violation(&set) {
        return Err(Error::NotDownwardClosed { member, missing });
    }
    Ok(set)
}

fn all_binary(n: usize) -> Vec<Outcome> {
    (0..1usize << n)
        .map(|mask| Outcome((0..n).map(|i| (mask >> i) & 1).collect()))
        .collect()
}
