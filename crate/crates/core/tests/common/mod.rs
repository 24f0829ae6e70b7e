#![allow(dead_code)]

use std::collections::BTreeSet;

use nonbossy::{
    enumerate_feasible_outcomes, q, DecisionEntry, DecisionList, Environment, FeasibilityConstraint,
    FeasibleSet, Outcome, PaymentVector, Rational, SequentialPostedPrice,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn int(x: i128) -> Rational {
    q(x, 1)
}

pub fn price_atoms() -> Vec<Rational> {
    vec![int(1), int(2), int(3)]
}

/// Downward closure of a few random generator sets, at most `max_outcomes` members.
pub fn random_feasible(rng: &mut ChaCha8Rng, n: usize, max_outcomes: usize) -> FeasibleSet {
    loop {
        let mut family: BTreeSet<u32> = BTreeSet::new();
        let gens = rng.gen_range(1..=3);
        for _ in 0..gens {
            let top: u32 = rng.gen_range(0..1u32 << n);
            let mut sub = top;
            loop {
                family.insert(sub);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & top;
            }
        }
        if family.len() > max_outcomes {
            continue;
        }
        let outcomes = family
            .into_iter()
            .map(|m| Outcome((0..n).map(|i| (m >> i & 1) as usize).collect()))
            .collect();
        return enumerate_feasible_outcomes(&FeasibilityConstraint::Explicit { outcomes }).unwrap();
    }
}

pub fn env_for(feasible: &FeasibleSet) -> Environment {
    let n = feasible.n_agents();
    Environment::single_parameter(vec![vec![int(0)]; n], feasible.clone()).unwrap()
}

/// Random list over some feasible outcomes, ending with the always-satisfied
/// empty outcome so that every profile gets a decision.
pub fn random_decision_list(rng: &mut ChaCha8Rng, feasible: &FeasibleSet, exception_rate: f64) -> DecisionList {
    let n = feasible.n_agents();
    let atoms = price_atoms();
    let mut chosen: Vec<Outcome> = feasible
        .outcomes()
        .iter()
        .filter(|o| !o.is_zero() && rng.gen_bool(0.7))
        .cloned()
        .collect();
    chosen.shuffle(rng);
    chosen.push(Outcome::zeros(n));
    let k = chosen.len();
    let entries = chosen
        .iter()
        .enumerate()
        .map(|(j, o)| {
            let prices = PaymentVector(
                (0..n)
                    .map(|i| if o.get(i) == 1 { *atoms.choose(rng).unwrap() } else { Rational::ZERO })
                    .collect(),
            );
            let exceptions = if j + 1 == k {
                Vec::new()
            } else {
                (0..k).filter(|&x| x != j && rng.gen_bool(exception_rate)).collect()
            };
            DecisionEntry::new(o.clone(), prices).with_exceptions(exceptions)
        })
        .collect();
    DecisionList::new(entries).unwrap()
}

/// Single-item take-it-or-leave-it path over a random subset of `n` agents.
pub fn random_single_item_plan(rng: &mut ChaCha8Rng, n: usize) -> SequentialPostedPrice {
    let atoms = price_atoms();
    let mut agents: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.85)).collect();
    agents.shuffle(rng);
    let offers: Vec<(usize, Rational)> = agents.into_iter().map(|a| (a, *atoms.choose(rng).unwrap())).collect();
    SequentialPostedPrice::single_item_path(n, &offers)
}

pub fn single_item(n: usize) -> FeasibleSet {
    enumerate_feasible_outcomes(&FeasibilityConstraint::KUniform { n, k: 1 }).unwrap()
}
