use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedValue {
    pub value: Rational,
    pub probability: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedProfile {
    pub values: Vec<Rational>,
    pub probability: Rational,
}

/// Exact finite prior over single-parameter item values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", try_from = "RawDistribution")]
pub enum JointDistribution {
    Product { marginals: Vec<Vec<WeightedValue>> },
    Explicit { profiles: Vec<WeightedProfile> },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum RawDistribution {
    Product { marginals: Vec<Vec<WeightedValue>> },
    Explicit { profiles: Vec<WeightedProfile> },
}

impl TryFrom<RawDistribution> for JointDistribution {
    type Error = Error;
    fn try_from(raw: RawDistribution) -> Result<Self> {
        match raw {
            RawDistribution::Product { marginals } => JointDistribution::product(
                marginals
                    .into_iter()
                    .map(|m| m.into_iter().map(|w| (w.value, w.probability)).collect())
                    .collect(),
            ),
            RawDistribution::Explicit { profiles } => JointDistribution::explicit(
                profiles.into_iter().map(|w| (w.values, w.probability)).collect(),
            ),
        }
    }
}

fn check_probability(path: &str, p: Rational) -> Result<()> {
    if p.is_negative() || p > Rational::ONE {
        return Err(Error::validation(path, format!("probability {p} outside [0,1]")));
    }
    Ok(())
}

fn check_total(path: &str, total: Rational) -> Result<()> {
    if total != Rational::ONE {
        return Err(Error::validation(path, format!("probabilities sum to {total}, not 1")));
    }
    Ok(())
}

impl JointDistribution {
    /// Independent agents; `marginals[i]` lists `(value, probability)`.
    pub fn product(marginals: Vec<Vec<(Rational, Rational)>>) -> Result<Self> {
        if marginals.is_empty() {
            return Err(Error::validation("marginals", "need at least one agent"));
        }
        let mut out = Vec::with_capacity(marginals.len());
        for (i, m) in marginals.into_iter().enumerate() {
            let path = format!("marginals[{i}]");
            let mut merged: BTreeMap<Rational, Rational> = BTreeMap::new();
            for (k, (v, p)) in m.iter().enumerate() {
                if v.is_negative() {
                    return Err(Error::validation(format!("{path}[{k}].value"), "negative value"));
                }
                check_probability(&format!("{path}[{k}].probability"), *p)?;
                if merged.contains_key(v) {
                    return Err(Error::validation(format!("{path}[{k}].value"), format!("value {v} listed twice")));
                }
                merged.insert(*v, *p);
            }
            check_total(&path, merged.values().copied().sum())?;
            out.push(
                merged
                    .into_iter()
                    .map(|(value, probability)| WeightedValue { value, probability })
                    .collect(),
            );
        }
        Ok(JointDistribution::Product { marginals: out })
    }

    /// Arbitrary joint prior given profile by profile.
    pub fn explicit(profiles: Vec<(Vec<Rational>, Rational)>) -> Result<Self> {
        let n = profiles.first().map(|(v, _)| v.len()).unwrap_or(0);
        if n == 0 {
            return Err(Error::validation("profiles", "need at least one profile with one agent"));
        }
        let mut merged: BTreeMap<Vec<Rational>, Rational> = BTreeMap::new();
        for (k, (v, p)) in profiles.iter().enumerate() {
            let path = format!("profiles[{k}]");
            if v.len() != n {
                return Err(Error::validation(format!("{path}.values"), format!("expected {n} values")));
            }
            if v.iter().any(Rational::is_negative) {
                return Err(Error::validation(format!("{path}.values"), "negative value"));
            }
            check_probability(&format!("{path}.probability"), *p)?;
            if merged.contains_key(v) {
                return Err(Error::validation(format!("{path}.values"), "profile listed twice"));
            }
            merged.insert(v.clone(), *p);
        }
        check_total("profiles", merged.values().copied().sum())?;
        Ok(JointDistribution::Explicit {
            profiles: merged
                .into_iter()
                .map(|(values, probability)| WeightedProfile { values, probability })
                .collect(),
        })
    }

    pub fn point_mass(values: Vec<Rational>) -> Result<Self> {
        JointDistribution::product(values.into_iter().map(|v| vec![(v, Rational::ONE)]).collect())
    }

    pub fn is_product(&self) -> bool {
        matches!(self, JointDistribution::Product { .. })
    }

    pub fn n_agents(&self) -> usize {
        match self {
            JointDistribution::Product { marginals } => marginals.len(),
            JointDistribution::Explicit { profiles } => profiles[0].values.len(),
        }
    }

    /// Every profile with positive probability, in lexicographic order.
    pub fn support(&self) -> Vec<(Vec<Rational>, Rational)> {
        match self {
            JointDistribution::Explicit { profiles } => profiles
                .iter()
                .filter(|w| !w.probability.is_zero())
                .map(|w| (w.values.clone(), w.probability))
                .collect(),
            JointDistribution::Product { marginals } => {
                let mut acc: Vec<(Vec<Rational>, Rational)> = vec![(Vec::new(), Rational::ONE)];
                for m in marginals {
                    let mut next = Vec::with_capacity(acc.len() * m.len());
                    for (prefix, p) in &acc {
                        for w in m.iter().filter(|w| !w.probability.is_zero()) {
                            let mut v = prefix.clone();
                            v.push(w.value);
                            next.push((v, *p * w.probability));
                        }
                    }
                    acc = next;
                }
                acc
            }
        }
    }

    /// Number of support profiles, without materializing them.
    pub fn support_size(&self) -> u128 {
        match self {
            JointDistribution::Explicit { profiles } => {
                profiles.iter().filter(|w| !w.probability.is_zero()).count() as u128
            }
            JointDistribution::Product { marginals } => marginals
                .iter()
                .map(|m| m.iter().filter(|w| !w.probability.is_zero()).count() as u128)
                .product(),
        }
    }

    /// Marginal of one agent as sorted `(value, probability)` pairs with positive mass.
    pub fn marginal(&self, agent: usize) -> Vec<(Rational, Rational)> {
        let mut m: BTreeMap<Rational, Rational> = BTreeMap::new();
        match self {
            JointDistribution::Product { marginals } => {
                for w in &marginals[agent] {
                    let cur = m.get(&w.value).copied().unwrap_or(Rational::ZERO);
                    m.insert(w.value, cur + w.probability);
                }
            }
            JointDistribution::Explicit { profiles } => {
                for w in profiles {
                    let cur = m.get(&w.values[agent]).copied().unwrap_or(Rational::ZERO);
                    m.insert(w.values[agent], cur + w.probability);
                }
            }
        }
        m.into_iter().filter(|(_, p)| !p.is_zero()).collect()
    }

    /// Support atoms of one agent.
    pub fn atoms(&self, agent: usize) -> Vec<Rational> {
        self.marginal(agent).into_iter().map(|(v, _)| v).collect()
    }

    pub fn all_atoms(&self) -> Vec<Vec<Rational>> {
        (0..self.n_agents()).map(|i| self.atoms(i)).collect()
    }

    /// `Pr[lo <= v_i < hi]`, with `hi = None` meaning unbounded.
    pub fn prob_in(&self, agent: usize, lo: Rational, hi: Option<Rational>) -> Rational {
        self.marginal(agent)
            .into_iter()
            .filter(|(v, _)| *v >= lo && hi.is_none_or(|h| *v < h))
            .map(|(_, p)| p)
            .sum()
    }
}
