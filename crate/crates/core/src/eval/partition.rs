use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::JointDistribution;
use crate::model::{enumerate_feasible_outcomes, FeasibilityConstraint, FeasibleSet};
use crate::rational::Rational;

/// Agents split into equal groups; winners must share a group and each
/// agent independently values the item at `value_on_hit` with probability `hit_probability`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionInstance {
    pub r: usize,
    pub groups: Vec<Vec<usize>>,
    pub hit_probability: Rational,
    pub value_on_hit: Rational,
    pub prior: JointDistribution,
    #[serde(skip)]
    feasible: Option<FeasibleSet>,
}

impl PartitionInstance {
    pub fn n_agents(&self) -> usize {
        self.groups.len() * self.r
    }

    pub fn feasible(&self) -> &FeasibleSet {
        self.feasible.as_ref().expect("built by make_partition_instance")
    }

    pub fn constraint(&self) -> FeasibilityConstraint {
        FeasibilityConstraint::Partition {
            groups: self.groups.clone(),
        }
    }
}

pub fn make_partition_instance(num_groups: usize, r: usize, p: Rational) -> Result<PartitionInstance> {
    if num_groups == 0 || r == 0 {
        return Err(Error::validation("partition", "need at least one group of at least one agent"));
    }
    if p <= Rational::ZERO || p > Rational::ONE {
        return Err(Error::validation("partition.p", format!("hit probability {p} outside (0,1]")));
    }
    let n = num_groups * r;
    if n > 20 {
        return Err(Error::SizeLimit {
            what: "partition instance".into(),
            cardinality: format!("2^{n} outcomes"),
            limit: "20 agents".into(),
        });
    }
    let groups: Vec<Vec<usize>> = (0..num_groups).map(|g| (g * r..(g + 1) * r).collect()).collect();
    let value_on_hit = Rational::ONE;
    let marginal = if p == Rational::ONE {
        vec![(value_on_hit, Rational::ONE)]
    } else {
        vec![(Rational::ZERO, Rational::ONE - p), (value_on_hit, p)]
    };
    let prior = JointDistribution::product(vec![marginal; n])?;
    let feasible = enumerate_feasible_outcomes(&FeasibilityConstraint::Partition { groups: groups.clone() })?;
    Ok(PartitionInstance {
        r,
        groups,
        hit_probability: p,
        value_on_hit,
        prior,
        feasible: Some(feasible),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn two_groups_of_two() {
        let inst = make_partition_instance(2, 2, q(1, 2)).unwrap();
        assert_eq!(inst.n_agents(), 4);
        assert_eq!(inst.groups, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(inst.feasible().rank(), 2);
        // empty, four singletons, one pair per group
        assert_eq!(inst.feasible().len(), 7);
    }

    #[test]
    fn single_agent_always_hits() {
        let inst = make_partition_instance(1, 1, q(1, 1)).unwrap();
        assert_eq!(inst.prior.support(), vec![(vec![q(1, 1)], q(1, 1))]);
        assert!(inst.feasible().is_single_item());
    }

    #[test]
    fn half_probability_regime() {
        let inst = make_partition_instance(4, 3, q(1, 3)).unwrap();
        assert_eq!(inst.n_agents(), 12);
        assert_eq!(inst.feasible().rank(), 3);
        assert_eq!(inst.feasible().len(), 1 + 4 * 7);
    }

    #[test]
    fn rejects_zero_probability() {
        assert!(make_partition_instance(1, 1, q(0, 1)).is_err());
    }
}
