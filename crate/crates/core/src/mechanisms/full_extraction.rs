use std::cmp::Reverse;

use crate::error::{Error, Result};
use crate::mechanisms::{DecisionEntry, DecisionList};
use crate::model::{find_closure_violation, FeasibleSet, Outcome, PaymentVector};
use crate::rational::Rational;

/// Full-extraction list for binary supports `{0, a_i}`: every feasible outcome,
/// sorted by `sum a_i o_i` decreasing (ties: larger vector first), each priced
/// at `a_i o_i` with no exceptions.
pub fn build_full_extraction_list(a: &[Rational], feasible: &FeasibleSet) -> Result<DecisionList> {
    if let Some((member, missing)) = find_closure_violation(feasible) {
        return Err(Error::NotDownwardClosed { member, missing });
    }
    if feasible.n_agents() != a.len() {
        return Err(Error::structural(format!(
            "{} values for {} agents",
            a.len(),
            feasible.n_agents()
        )));
    }
    if let Some(i) = a.iter().position(Rational::is_negative) {
        return Err(Error::validation(format!("values[{i}]"), "negative value"));
    }
    let price = |o: &Outcome| PaymentVector(o.0.iter().zip(a).map(|(&c, &x)| if c == 1 { x } else { Rational::ZERO }).collect());
    let mut outcomes: Vec<(Rational, Outcome)> = feasible
        .outcomes()
        .iter()
        .map(|o| (price(o).total(), o.clone()))
        .collect();
    outcomes.sort_by_key(|(w, o)| (Reverse(*w), Reverse(o.clone())));
    let entries = outcomes
        .into_iter()
        .map(|(_, o)| DecisionEntry::new(o.clone(), price(&o)))
        .collect();
    DecisionList::new(entries)
}
