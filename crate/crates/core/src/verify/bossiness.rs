use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Decision, TabularMechanism, Valuation};
use crate::verify::incentive::first_by_agent;
use crate::verify::{check_ic, Property, PropertyReport, Witness};

/// First pair of profiles differing only in `agent`'s report where the
/// agent's own (outcome, payment) is unchanged but the full decision is not.
fn bossy_pair(tab: &TabularMechanism, agent: usize) -> Option<(usize, usize)> {
    let grid = tab.grid();
    for idx in 0..grid.len() {
        let t = grid.coord(idx, agent);
        for t2 in t + 1..grid.types(agent).len() {
            let other = grid.with_coord(idx, agent, t2);
            let (a, b) = (tab.row(idx), tab.row(other));
            if a.personal(agent) == b.personal(agent) && a != b {
                return Some((idx, other));
            }
        }
    }
    None
}

pub fn check_nb(tab: &TabularMechanism) -> PropertyReport {
    let grid = tab.grid();
    let witness = first_by_agent(tab.n_agents(), |i| {
        bossy_pair(tab, i).map(|(a, b)| Witness {
            agent: Some(i),
            profiles: vec![grid.profile(a), grid.profile(b)],
            decisions: vec![tab.row(a).clone(), tab.row(b).clone()],
            detail: "own outcome and payment unchanged, another agent's changes".into(),
        })
    });
    PropertyReport::new(Property::Nb, grid.describe(), witness)
}

/// Lexicographic external preference of the manipulator about the target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExternalPreference {
    /// Prefers whatever is better for the target.
    CaresPositively,
    /// Prefers whatever is worse for the target.
    CaresNegatively,
}

impl ExternalPreference {
    pub fn flipped(self) -> Self {
        match self {
            ExternalPreference::CaresPositively => ExternalPreference::CaresNegatively,
            ExternalPreference::CaresNegatively => ExternalPreference::CaresPositively,
        }
    }
}

/// A profitable deviation under own-utility-first, then-care-about-target preferences.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManipulationCertificate {
    pub manipulator: usize,
    pub target: usize,
    /// Reports of every agent other than the manipulator, in agent order.
    pub fixed_others: Vec<Valuation>,
    pub truthful: Valuation,
    pub deviation: Valuation,
    pub external_preference: ExternalPreference,
    pub before: Decision,
    pub after: Decision,
}

impl ManipulationCertificate {
    /// The same pair of profiles read in the other direction.
    pub fn reversed(&self) -> Self {
        ManipulationCertificate {
            truthful: self.deviation.clone(),
            deviation: self.truthful.clone(),
            before: self.after.clone(),
            after: self.before.clone(),
            external_preference: self.external_preference.flipped(),
            ..self.clone()
        }
    }

    fn target_valuation(&self) -> &Valuation {
        let k = if self.target < self.manipulator { self.target } else { self.target - 1 };
        &self.fixed_others[k]
    }

    /// Check the certificate against the tiebreak rule of `tab`'s environment.
    pub fn is_valid(&self, tab: &TabularMechanism) -> bool {
        let i = self.manipulator;
        let j = self.target;
        if i == j || self.before.personal(i) != self.after.personal(i) {
            return false;
        }
        if self.before.personal(j) == self.after.personal(j) {
            return false;
        }
        let improves = target_improves(tab, j, self.target_valuation(), &self.before, &self.after);
        improves == (self.external_preference == ExternalPreference::CaresPositively)
    }
}

/// Does `j`'s internal preference strictly prefer `after` to `before`?
fn target_improves(tab: &TabularMechanism, j: usize, v: &Valuation, before: &Decision, after: &Decision) -> bool {
    let (ub, ua) = (before.utility(j, v), after.utility(j, v));
    ua > ub
        || (ua == ub
            && tab
                .env()
                .tiebreak(j)
                .strictly_prefers(after.outcome.get(j), before.outcome.get(j)))
}

/// A secondary-goal manipulation certificate for an IC table, present
/// exactly when the table is bossy.
///
/// The manipulator's deviation is the lower of the two reports in the
/// bossy pair; the external preference follows the target's change.
pub fn build_rwsg_witness(tab: &TabularMechanism) -> Result<Option<ManipulationCertificate>> {
    if !check_ic(tab).holds {
        return Err(Error::IcRequired);
    }
    let grid = tab.grid();
    let n = tab.n_agents();
    let Some((i, (low, high))) = (0..n).find_map(|i| bossy_pair(tab, i).map(|p| (i, p))) else {
        return Ok(None);
    };
    let before = tab.row(high).clone();
    let after = tab.row(low).clone();
    let j = (0..n)
        .find(|&j| j != i && before.personal(j) != after.personal(j))
        .expect("bossy pair changes another agent");
    let profile = grid.profile(high);
    let external_preference = if target_improves(tab, j, &profile[j], &before, &after) {
        ExternalPreference::CaresPositively
    } else {
        ExternalPreference::CaresNegatively
    };
    Ok(Some(ManipulationCertificate {
        manipulator: i,
        target: j,
        fixed_others: profile.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, v)| v.clone()).collect(),
        truthful: grid.valuation(high, i).clone(),
        deviation: grid.valuation(low, i).clone(),
        external_preference,
        before,
        after,
    }))
}
