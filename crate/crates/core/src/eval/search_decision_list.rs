use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{expected_metrics, JointDistribution, MechanismMetrics, Objective};
use crate::mechanisms::{DecisionEntry, DecisionList};
use crate::model::{
    build_canonical_grid, satisfies_unchecked, Decision, Environment, FeasibleSet, Outcome, PaymentVector,
    TabularMechanism,
};
use crate::rational::Rational;
use crate::verify::check_ic;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecisionListLimits {
    pub max_outcomes: usize,
    pub max_atoms: usize,
    pub max_candidates: u128,
}

impl Default for DecisionListLimits {
    fn default() -> Self {
        DecisionListLimits {
            max_outcomes: 8,
            max_atoms: 3,
            max_candidates: 20_000_000,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecisionListSearch {
    pub objective: Objective,
    pub list: DecisionList,
    pub metrics: MechanismMetrics,
    pub value: Rational,
    pub candidates: String,
    /// Candidates that are order-oblivious and IC on the canonical grid.
    pub admissible: u64,
    pub elapsed_ms: u128,
}

/// Per-outcome choices: every price vector over the winners' atoms.
fn price_options(o: &Outcome, atoms: &[Vec<Rational>]) -> Vec<PaymentVector> {
    let mut out = vec![PaymentVector::zeros(o.len())];
    for i in o.winners() {
        out = out
            .into_iter()
            .flat_map(|p| {
                atoms[i].iter().map(move |&x| {
                    let mut q = p.clone();
                    q.0[i] = x;
                    q
                })
            })
            .collect();
    }
    out
}

struct Space {
    outcomes: Vec<Outcome>,
    prices: Vec<Vec<PaymentVector>>,
    radix: Vec<u128>,
}

impl Space {
    /// Candidate `code` as (price choice, exception mask over other outcomes) per outcome.
    fn decode(&self, mut code: u128) -> Vec<(usize, u64)> {
        let others = 1u128 << (self.outcomes.len() - 1);
        self.radix
            .iter()
            .map(|&r| {
                let digit = code % r;
                code /= r;
                ((digit / others) as usize, (digit % others) as u64)
            })
            .collect()
    }

    /// Indices of the other outcomes selected by `mask`.
    fn exceptions(&self, j: usize, mask: u64) -> Vec<usize> {
        (0..self.outcomes.len())
            .filter(|&x| x != j)
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, x)| x)
            .collect()
    }

    fn list(&self, code: u128) -> DecisionList {
        let entries = self
            .decode(code)
            .into_iter()
            .enumerate()
            .map(|(j, (pc, mask))| {
                DecisionEntry::new(self.outcomes[j].clone(), self.prices[j][pc].clone())
                    .with_exceptions(self.exceptions(j, mask))
            })
            .collect();
        DecisionList::new(entries).expect("candidate lists are well-formed")
    }
}

/// Best order-oblivious, IC decision list with prices from `price_atoms`.
///
/// Every feasible outcome gets an entry; an entry whose exceptions include
/// the empty outcome can never fire, which covers lists that omit it.
/// Ties go to the first candidate in enumeration order.
pub fn search_optimal_decision_list(
    dist: &JointDistribution,
    feasible: &FeasibleSet,
    price_atoms: &[Vec<Rational>],
    objective: Objective,
    limits: DecisionListLimits,
) -> Result<DecisionListSearch> {
    let start = Instant::now();
    let n = feasible.n_agents();
    if dist.n_agents() != n || price_atoms.len() != n {
        return Err(Error::structural(format!(
            "prior has {} agents, prices {}, feasible set {n}",
            dist.n_agents(),
            price_atoms.len()
        )));
    }
    let env = Environment::single_parameter(dist.all_atoms(), feasible.clone())?;
    let mut atoms: Vec<Vec<Rational>> = price_atoms.to_vec();
    for a in &mut atoms {
        a.sort();
        a.dedup();
    }
    let outcomes = feasible.outcomes().to_vec();
    let k = outcomes.len();
    let widest = atoms.iter().map(Vec::len).max().unwrap_or(0);
    let (radix, total) = if k <= 64 {
        let prices: Vec<u128> = outcomes.iter().map(|o| o.winners().map(|i| atoms[i].len() as u128).product()).collect();
        let radix: Vec<Option<u128>> = prices.iter().map(|&p| p.checked_mul(1u128.checked_shl(k as u32 - 1)?)).collect();
        let total = radix.iter().try_fold(1u128, |acc, r| acc.checked_mul((*r)?));
        (radix.into_iter().map(|r| r.unwrap_or(0)).collect::<Vec<_>>(), total)
    } else {
        (Vec::new(), None)
    };
    let within = total.is_some_and(|t| t <= limits.max_candidates);
    if k > limits.max_outcomes || widest > limits.max_atoms || !within {
        return Err(Error::SizeLimit {
            what: format!("decision-list search ({k} outcomes, up to {widest} price atoms)"),
            cardinality: total.map_or_else(|| "more than 2^128".into(), |t| t.to_string()),
            limit: format!(
                "{} outcomes, {} atoms, {} candidates",
                limits.max_outcomes, limits.max_atoms, limits.max_candidates
            ),
        });
    }
    let total = total.expect("checked above");
    let prices: Vec<Vec<PaymentVector>> = outcomes.iter().map(|o| price_options(o, &atoms)).collect();

    let grid = build_canonical_grid(&env, &atoms)?;
    let profiles: Vec<_> = (0..grid.len()).map(|idx| grid.profile(idx)).collect();
    // sat[j][pc][idx]: profile idx satisfies outcome j at price choice pc.
    let sat: Vec<Vec<Vec<bool>>> = outcomes
        .iter()
        .zip(&prices)
        .map(|(o, ps)| {
            ps.iter()
                .map(|p| profiles.iter().map(|v| satisfies_unchecked(v, o, p)).collect())
                .collect()
        })
        .collect();
    let space = Space { outcomes, prices, radix };

    let evaluate = |code: u128| -> Option<Rational> {
        let digits = space.decode(code);
        let mut rows = Vec::with_capacity(grid.len());
        #[allow(clippy::needless_range_loop)]
        for idx in 0..grid.len() {
            let mut fired = None;
            for (j, &(pc, mask)) in digits.iter().enumerate() {
                if !sat[j][pc][idx] {
                    continue;
                }
                let blocked = space
                    .exceptions(j, mask)
                    .into_iter()
                    .any(|x| sat[x][digits[x].0][idx]);
                if !blocked {
                    if fired.is_some() {
                        return None;
                    }
                    fired = Some(j);
                }
            }
            let j = fired?;
            rows.push(Decision::new(space.outcomes[j].clone(), space.prices[j][digits[j].0].clone()));
        }
        let tab = TabularMechanism::new(&env, grid.clone(), rows).ok()?;
        if !check_ic(&tab).holds {
            return None;
        }
        let m = expected_metrics(&tab, dist).ok()?;
        let value = match objective {
            Objective::Revenue => m.expected_revenue,
            Objective::Welfare => m.expected_welfare,
        };
        Some(value)
    };

    let (best, admissible) = (0..total)
        .into_par_iter()
        .map(|code| match evaluate(code) {
            Some(value) => (Some((value, code)), 1u64),
            None => (None, 0),
        })
        .reduce(
            || (None, 0),
            |(a, na), (b, nb)| {
                let best = match (a, b) {
                    (Some(x), Some(y)) => Some(if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x }),
                    (x, y) => x.or(y),
                };
                (best, na + nb)
            },
        );
    let (value, code) = best.ok_or_else(|| Error::Mismatch("no admissible decision list".into()))?;
    let list = space.list(code).claim_order_oblivious(true);
    let metrics = expected_metrics(&list, dist)?;
    Ok(DecisionListSearch {
        objective,
        list,
        metrics,
        value,
        candidates: total.to_string(),
        admissible,
        elapsed_ms: start.elapsed().as_millis(),
    })
}
