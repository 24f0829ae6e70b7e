use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FeasibleSet, Outcome, Valuation};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvironmentKind {
    SingleParameter,
    CommonOutcome,
}

/// Strict preference over one agent's personal outcomes, used only to break
/// utility ties. Stored as a list from most to least preferred.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tiebreak(Vec<usize>);

impl Tiebreak {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &o in &order {
            if o >= order.len() || seen[o] {
                return Err(Error::validation(
                    "tiebreak",
                    format!("{order:?} is not a permutation of 0..{}", order.len()),
                ));
            }
            seen[o] = true;
        }
        Ok(Tiebreak(order))
    }

    /// Receiving the item is preferred when utilities tie.
    pub fn prefer_item() -> Self {
        Tiebreak(vec![1, 0])
    }

    pub fn prefer_nothing() -> Self {
        Tiebreak(vec![0, 1])
    }

    pub fn identity(m: usize) -> Self {
        Tiebreak((0..m).collect())
    }

    pub fn order(&self) -> &[usize] {
        &self.0
    }

    fn rank(&self, o: usize) -> usize {
        self.0.iter().position(|&x| x == o).expect("outcome in tiebreak")
    }

    /// `a` is weakly preferred to `b` (the relation written ⪯ in the IC condition).
    pub fn weakly_prefers(&self, a: usize, b: usize) -> bool {
        self.rank(a) <= self.rank(b)
    }

    pub fn strictly_prefers(&self, a: usize, b: usize) -> bool {
        self.rank(a) < self.rank(b)
    }
}

/// Agents, their finite valuation spaces, feasible outcomes and tiebreaking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Environment {
    kind: EnvironmentKind,
    personal_outcomes: Vec<usize>,
    feasible: FeasibleSet,
    types: Vec<Vec<Valuation>>,
    tiebreak: Vec<Tiebreak>,
}

impl Environment {
    /// Single-parameter environment: `atoms[i]` are agent i's item values.
    pub fn single_parameter(atoms: Vec<Vec<Rational>>, feasible: FeasibleSet) -> Result<Self> {
        let n = atoms.len();
        if n == 0 {
            return Err(Error::validation("agents", "need at least one agent"));
        }
        for (i, a) in atoms.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::validation(format!("atoms[{i}]"), "empty atom set"));
            }
            for (k, x) in a.iter().enumerate() {
                if x.is_negative() {
                    return Err(Error::validation(
                        format!("atoms[{i}][{k}]"),
                        format!("value {x} is negative"),
                    ));
                }
                if k > 0 && a[k - 1] >= *x {
                    return Err(Error::validation(
                        format!("atoms[{i}][{k}]"),
                        "atoms must be strictly increasing",
                    ));
                }
            }
        }
        if feasible.n_agents() != n {
            return Err(Error::validation(
                "feasible",
                format!("outcomes have {} coordinates, expected {n}", feasible.n_agents()),
            ));
        }
        if !feasible.contains(&Outcome::zeros(n)) {
            return Err(Error::validation("feasible", "the all-zeros outcome must be feasible"));
        }
        if feasible.outcomes().iter().any(|o| o.0.iter().any(|&c| c > 1)) {
            return Err(Error::validation("feasible", "outcomes must be 0/1 vectors"));
        }
        let types = atoms
            .into_iter()
            .map(|a| a.into_iter().map(Valuation::item).collect())
            .collect();
        Ok(Environment {
            kind: EnvironmentKind::SingleParameter,
            personal_outcomes: vec![2; n],
            feasible,
            types,
            tiebreak: vec![Tiebreak::prefer_item(); n],
        })
    }

    /// Common-outcome (or general finite) environment with explicit valuation
    /// vectors per agent. `valuations[i][t][o]` is type t's value for personal outcome o.
    pub fn common_outcome(
        valuations: Vec<Vec<Valuation>>,
        outcomes_per_agent: usize,
        feasible: FeasibleSet,
    ) -> Result<Self> {
        let n = valuations.len();
        if n == 0 {
            return Err(Error::validation("agents", "need at least one agent"));
        }
        for (i, vs) in valuations.iter().enumerate() {
            if vs.is_empty() {
                return Err(Error::validation(format!("atoms[{i}]"), "empty valuation set"));
            }
            for (t, v) in vs.iter().enumerate() {
                if v.len() != outcomes_per_agent {
                    return Err(Error::validation(
                        format!("atoms[{i}][{t}]"),
                        format!("expected {outcomes_per_agent} values, found {}", v.len()),
                    ));
                }
                if v.0.iter().any(Rational::is_negative) {
                    return Err(Error::validation(format!("atoms[{i}][{t}]"), "negative value"));
                }
                if vs[..t].contains(v) {
                    return Err(Error::validation(format!("atoms[{i}][{t}]"), "duplicate valuation"));
                }
            }
        }
        for (k, o) in feasible.outcomes().iter().enumerate() {
            if o.len() != n || o.0.iter().any(|&c| c >= outcomes_per_agent) {
                return Err(Error::validation(
                    format!("feasible[{k}]"),
                    format!("outcome {o} does not fit {n} agents with {outcomes_per_agent} personal outcomes"),
                ));
            }
        }
        Ok(Environment {
            kind: EnvironmentKind::CommonOutcome,
            personal_outcomes: vec![outcomes_per_agent; n],
            feasible,
            types: valuations,
            tiebreak: vec![Tiebreak::identity(outcomes_per_agent); n],
        })
    }

    pub fn with_tiebreak(mut self, tiebreak: Vec<Tiebreak>) -> Result<Self> {
        if tiebreak.len() != self.n_agents() {
            return Err(Error::validation("tiebreak", "one order per agent required"));
        }
        for (i, t) in tiebreak.iter().enumerate() {
            if t.order().len() != self.personal_outcomes[i] {
                return Err(Error::validation(
                    format!("tiebreak[{i}]"),
                    format!("must order {} personal outcomes", self.personal_outcomes[i]),
                ));
            }
        }
        self.tiebreak = tiebreak;
        Ok(self)
    }

    pub fn kind(&self) -> EnvironmentKind {
        self.kind
    }

    pub fn is_single_parameter(&self) -> bool {
        self.kind == EnvironmentKind::SingleParameter
    }

    pub fn n_agents(&self) -> usize {
        self.types.len()
    }

    pub fn personal_outcomes(&self, agent: usize) -> usize {
        self.personal_outcomes[agent]
    }

    pub fn feasible(&self) -> &FeasibleSet {
        &self.feasible
    }

    /// The finite valuation space of one agent.
    pub fn types(&self, agent: usize) -> &[Valuation] {
        &self.types[agent]
    }

    pub fn all_types(&self) -> &[Vec<Valuation>] {
        &self.types
    }

    /// Item values of a single-parameter agent.
    pub fn value_atoms(&self, agent: usize) -> Vec<Rational> {
        self.types[agent].iter().map(Valuation::item_value).collect()
    }

    pub fn tiebreak(&self, agent: usize) -> &Tiebreak {
        &self.tiebreak[agent]
    }

    pub fn tiebreaks(&self) -> &[Tiebreak] {
        &self.tiebreak
    }

    pub(crate) fn require_single_parameter(&self, what: &str) -> Result<()> {
        if self.is_single_parameter() {
            Ok(())
        } else {
            Err(Error::Applicability(format!(
                "{what} needs a single-parameter environment"
            )))
        }
    }

    /// Same environment with a replaced valuation space (used by canonical grids).
    pub(crate) fn with_types(&self, types: Vec<Vec<Valuation>>) -> Self {
        Environment {
            types,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{enumerate_feasible_outcomes, FeasibilityConstraint};
    use crate::rational::q;

    #[test]
    fn rejects_unsorted_atoms() {
        let feasible =
            enumerate_feasible_outcomes(&FeasibilityConstraint::Unconstrained { n: 1 }).unwrap();
        let err = Environment::single_parameter(vec![vec![q(2, 1), q(1, 1)]], feasible).unwrap_err();
        assert!(err.to_string().contains("atoms[0][1]"));
    }

    #[test]
    fn tiebreak_must_be_permutation() {
        assert!(Tiebreak::new(vec![0, 0]).is_err());
        let t = Tiebreak::new(vec![2, 0, 1]).unwrap();
        assert!(t.strictly_prefers(2, 0));
        assert!(t.weakly_prefers(0, 0));
        assert!(!t.weakly_prefers(1, 2));
    }

    #[test]
    fn requires_zero_outcome() {
        let feasible = FeasibleSet::from_outcomes(vec![Outcome(vec![1])]);
        assert!(Environment::single_parameter(vec![vec![q(1, 1)]], feasible).is_err());
    }
}
