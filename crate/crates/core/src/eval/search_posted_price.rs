use std::collections::HashMap;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{expected_metrics, JointDistribution, MechanismMetrics};
use crate::mechanisms::{Offer, SequentialPostedPrice};
use crate::model::{FeasibleSet, Outcome};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    Revenue,
    Welfare,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PostedPriceLimits {
    pub max_agents: usize,
    pub max_atoms: usize,
}

impl Default for PostedPriceLimits {
    fn default() -> Self {
        PostedPriceLimits {
            max_agents: 4,
            max_atoms: 3,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PostedPriceSearch {
    pub objective: Objective,
    pub plan: SequentialPostedPrice,
    pub metrics: MechanismMetrics,
    pub value: Rational,
    /// Number of distinct plans in the searched class (zero-mass pruning aside).
    pub plan_count: String,
    pub states: usize,
    pub elapsed_ms: u128,
}

/// Union of every agent's support atoms, the default candidate price set.
pub fn default_price_atoms(dist: &JointDistribution) -> Vec<Vec<Rational>> {
    let mut all: Vec<Rational> = dist.all_atoms().into_iter().flatten().collect();
    all.sort();
    all.dedup();
    vec![all; dist.n_agents()]
}

/// Number of adaptive plans: stop, or an offer followed by a plan per answer.
pub fn posted_price_plan_count(feasible: &FeasibleSet, price_atoms: &[Vec<Rational>]) -> BigUint {
    fn go(
        visited: u32,
        accepted: u32,
        feasible: &FeasibleSet,
        atoms: &[Vec<Rational>],
        memo: &mut HashMap<(u32, u32), BigUint>,
    ) -> BigUint {
        if let Some(c) = memo.get(&(visited, accepted)) {
            return c.clone();
        }
        let n = atoms.len();
        let mut total = BigUint::one();
        for a in 0..n {
            if visited >> a & 1 == 1 || !feasible.contains(&mask_outcome(n, accepted | 1 << a)) {
                continue;
            }
            let acc = go(visited | 1 << a, accepted | 1 << a, feasible, atoms, memo);
            let rej = go(visited | 1 << a, accepted, feasible, atoms, memo);
            total += acc * rej * BigUint::from(atoms[a].len());
        }
        memo.insert((visited, accepted), total.clone());
        total
    }
    go(0, 0, feasible, price_atoms, &mut HashMap::new())
}

fn mask_outcome(n: usize, mask: u32) -> Outcome {
    Outcome((0..n).map(|i| (mask >> i & 1) as usize).collect())
}

/// Keyed by (visited agents, accepted agents, surviving support bitset).
type Memo = HashMap<(u32, u32, Vec<u64>), (Rational, Option<Offer>)>;

struct Dp<'a> {
    feasible: &'a FeasibleSet,
    atoms: &'a [Vec<Rational>],
    support: Vec<(Vec<Rational>, Rational)>,
    objective: Objective,
    memo: Memo,
}

impl Dp<'_> {
    /// Best expected objective (unnormalized by the posterior mass) from a history.
    fn solve(&mut self, visited: u32, accepted: u32, alive: Vec<u64>) -> (Rational, Option<Offer>) {
        if alive.iter().all(|w| *w == 0) {
            return (Rational::ZERO, None);
        }
        let key = (visited, accepted, alive);
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let alive = key.2.clone();
        let n = self.atoms.len();
        let mut best: (Rational, Option<Offer>) = (Rational::ZERO, None);
        for a in 0..n {
            if visited >> a & 1 == 1 || !self.feasible.contains(&mask_outcome(n, accepted | 1 << a)) {
                continue;
            }
            for &price in &self.atoms[a] {
                let mut yes = vec![0u64; alive.len()];
                let mut no = vec![0u64; alive.len()];
                let mut gain = Rational::ZERO;
                for (k, (v, p)) in self.support.iter().enumerate() {
                    if alive[k / 64] >> (k % 64) & 1 == 0 {
                        continue;
                    }
                    if v[a] >= price {
                        yes[k / 64] |= 1 << (k % 64);
                        gain += *p
                            * match self.objective {
                                Objective::Revenue => price,
                                Objective::Welfare => v[a],
                            };
                    } else {
                        no[k / 64] |= 1 << (k % 64);
                    }
                }
                let (va, pa) = self.solve(visited | 1 << a, accepted | 1 << a, yes);
                let (vr, pr) = self.solve(visited | 1 << a, accepted, no);
                let value = gain + va + vr;
                if value > best.0 {
                    best = (
                        value,
                        Some(Offer {
                            agent: a,
                            price,
                            accept: pa.map(Box::new),
                            reject: pr.map(Box::new),
                        }),
                    );
                }
            }
        }
        self.memo.insert(key, best.clone());
        best
    }
}

/// Optimal adaptive sequential posted-price plan by exact dynamic
/// programming over accept/reject histories. Among optimal plans the one
/// that stops earliest, then offers to the lowest agent, then at the lowest
/// price, is returned.
pub fn search_optimal_posted_price(
    dist: &JointDistribution,
    feasible: &FeasibleSet,
    price_atoms: &[Vec<Rational>],
    objective: Objective,
    limits: PostedPriceLimits,
) -> Result<PostedPriceSearch> {
    let start = Instant::now();
    let n = feasible.n_agents();
    if dist.n_agents() != n || price_atoms.len() != n {
        return Err(Error::structural(format!(
            "prior has {} agents, prices {}, feasible set {n}",
            dist.n_agents(),
            price_atoms.len()
        )));
    }
    let mut atoms: Vec<Vec<Rational>> = price_atoms.to_vec();
    for a in &mut atoms {
        a.sort();
        a.dedup();
    }
    let widest = atoms.iter().map(Vec::len).max().unwrap_or(0);
    if n > 31 {
        return Err(Error::SizeLimit {
            what: format!("posted-price search ({n} agents)"),
            cardinality: "not computed".into(),
            limit: "31 agents".into(),
        });
    }
    let count = posted_price_plan_count(feasible, &atoms);
    if n > limits.max_agents || widest > limits.max_atoms {
        return Err(Error::SizeLimit {
            what: format!("posted-price search ({n} agents, up to {widest} price atoms)"),
            cardinality: count.to_string(),
            limit: format!("{} agents, {} atoms", limits.max_agents, limits.max_atoms),
        });
    }
    let support = dist.support();
    let words = support.len().div_ceil(64);
    let mut alive = vec![0u64; words];
    for k in 0..support.len() {
        alive[k / 64] |= 1 << (k % 64);
    }
    let mut dp = Dp {
        feasible,
        atoms: &atoms,
        support,
        objective,
        memo: HashMap::new(),
    };
    let (value, root) = dp.solve(0, 0, alive);
    let plan = SequentialPostedPrice::new(n, root);
    let metrics = expected_metrics(&plan, dist)?;
    let check = match objective {
        Objective::Revenue => metrics.expected_revenue,
        Objective::Welfare => metrics.expected_welfare,
    };
    if check != value {
        return Err(Error::Mismatch(format!(
            "search value {value} differs from plan evaluation {check}"
        )));
    }
    Ok(PostedPriceSearch {
        objective,
        plan,
        metrics,
        value,
        plan_count: count.to_string(),
        states: dp.memo.len(),
        elapsed_ms: start.elapsed().as_millis(),
    })
}
