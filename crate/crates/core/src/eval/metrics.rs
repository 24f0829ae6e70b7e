use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::JointDistribution;
use crate::mechanisms::Mechanism;
use crate::model::{item_profile, FeasibleSet, Outcome};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileMetrics {
    pub values: Vec<Rational>,
    pub probability: Rational,
    pub outcome: Outcome,
    pub welfare: Rational,
    pub revenue: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MechanismMetrics {
    pub expected_welfare: Rational,
    pub expected_revenue: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_profile: Option<Vec<ProfileMetrics>>,
}

fn check_arity(dist: &JointDistribution, n: usize) -> Result<()> {
    if dist.n_agents() != n {
        return Err(Error::structural(format!(
            "prior has {} agents, expected {n}",
            dist.n_agents()
        )));
    }
    Ok(())
}

/// Welfare-maximizing feasible outcome for item values `v`; among maximizers
/// the lexicographically largest vector wins.
pub fn optimal_outcome<'a>(values: &[Rational], feasible: &'a FeasibleSet) -> (&'a Outcome, Rational) {
    let mut best: Option<(&Outcome, Rational)> = None;
    for o in feasible.outcomes() {
        let w: Rational = o.winners().map(|i| values[i]).sum();
        match best {
            Some((bo, bw)) if bw > w || (bw == w && bo > o) => {}
            _ => best = Some((o, w)),
        }
    }
    best.expect("feasible set contains the zero outcome")
}

/// `E[max_o sum_i v_i o_i]` by support enumeration.
pub fn expected_optimal_welfare(dist: &JointDistribution, feasible: &FeasibleSet) -> Result<Rational> {
    check_arity(dist, feasible.n_agents())?;
    Ok(dist
        .support()
        .iter()
        .map(|(v, p)| *p * optimal_outcome(v, feasible).1)
        .sum())
}

/// Exact expected welfare and revenue of `mech` under `dist`.
pub fn expected_metrics<M: Mechanism + ?Sized>(mech: &M, dist: &JointDistribution) -> Result<MechanismMetrics> {
    let mut m = expected_metrics_detailed(mech, dist)?;
    m.per_profile = None;
    Ok(m)
}

pub fn expected_metrics_detailed<M: Mechanism + ?Sized>(
    mech: &M,
    dist: &JointDistribution,
) -> Result<MechanismMetrics> {
    let mut welfare = Rational::ZERO;
    let mut revenue = Rational::ZERO;
    let mut rows = Vec::new();
    for (values, p) in dist.support() {
        let profile = item_profile(&values);
        let d = mech.evaluate(&profile)?;
        let w = d.welfare(&profile);
        let r = d.revenue();
        welfare += p * w;
        revenue += p * r;
        rows.push(ProfileMetrics {
            values,
            probability: p,
            outcome: d.outcome,
            welfare: w,
            revenue: r,
        });
    }
    Ok(MechanismMetrics {
        expected_welfare: welfare,
        expected_revenue: revenue,
        per_profile: Some(rows),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{enumerate_feasible_outcomes, FeasibilityConstraint};
    use crate::rational::q;

    #[test]
    fn point_mass_single_item() {
        let f = enumerate_feasible_outcomes(&FeasibilityConstraint::KUniform { n: 2, k: 1 }).unwrap();
        let d = JointDistribution::point_mass(vec![q(3, 1), q(1, 1)]).unwrap();
        assert_eq!(expected_optimal_welfare(&d, &f).unwrap(), q(3, 1));
    }

    #[test]
    fn ties_pick_largest_vector() {
        let f = enumerate_feasible_outcomes(&FeasibilityConstraint::KUniform { n: 2, k: 1 }).unwrap();
        let (o, w) = optimal_outcome(&[q(1, 1), q(1, 1)], &f);
        assert_eq!(o, &Outcome(vec![1, 0]));
        assert_eq!(w, q(1, 1));
        let (o, _) = optimal_outcome(&[q(0, 1), q(0, 1)], &f);
        assert_eq!(o, &Outcome(vec![1, 0]));
    }
}
