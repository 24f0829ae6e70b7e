use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Joint outcome: one personal outcome index per agent.
///
/// In single-parameter environments coordinates are 0 (no item) or 1 (item).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Outcome(pub Vec<usize>);

impl Outcome {
    pub fn zeros(n: usize) -> Self {
        Outcome(vec![0; n])
    }

    /// Single-item outcome giving the item to `agent`.
    pub fn unit(n: usize, agent: usize) -> Self {
        let mut o = vec![0; n];
        o[agent] = 1;
        Outcome(o)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, agent: usize) -> usize {
        self.0[agent]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Number of agents receiving an item (single-parameter reading).
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&c| c != 0).count()
    }

    pub fn winners(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, _)| i)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PaymentVector(pub Vec<Rational>);

impl PaymentVector {
    pub fn zeros(n: usize) -> Self {
        PaymentVector(vec![Rational::ZERO; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, agent: usize) -> Rational {
        self.0[agent]
    }

    pub fn total(&self) -> Rational {
        self.0.iter().sum()
    }
}

impl fmt::Display for PaymentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for PaymentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A valuation maps each personal outcome index to a value.
///
/// Single-parameter valuations are `[0, x]`: no item is worth 0, the item `x`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Valuation(pub Vec<Rational>);

impl Valuation {
    pub fn item(value: Rational) -> Self {
        Valuation(vec![Rational::ZERO, value])
    }

    pub fn value(&self, personal_outcome: usize) -> Rational {
        self.0[personal_outcome]
    }

    /// Value of receiving an item, for single-parameter valuations.
    pub fn item_value(&self) -> Rational {
        self.0[1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 2 && self.0[0].is_zero() {
            return write!(f, "{}", self.0[1]);
        }
        write!(f, "[")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A reported profile: one valuation per agent.
pub type ValuationProfile = [Valuation];

/// Build a single-parameter profile from item values.
pub fn item_profile(values: &[Rational]) -> Vec<Valuation> {
    values.iter().copied().map(Valuation::item).collect()
}

pub fn render_profile(profile: &ValuationProfile) -> String {
    let parts: Vec<String> = profile.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Outcome together with the payment vector charged for it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Decision {
    pub outcome: Outcome,
    pub payments: PaymentVector,
}

impl Decision {
    pub fn new(outcome: Outcome, payments: PaymentVector) -> Self {
        Decision { outcome, payments }
    }

    pub fn nothing(n: usize) -> Self {
        Decision::new(Outcome::zeros(n), PaymentVector::zeros(n))
    }

    /// Agent's own (personal outcome, payment) pair.
    pub fn personal(&self, agent: usize) -> (usize, Rational) {
        (self.outcome.get(agent), self.payments.get(agent))
    }

    pub fn utility(&self, agent: usize, valuation: &Valuation) -> Rational {
        valuation.value(self.outcome.get(agent)) - self.payments.get(agent)
    }

    pub fn welfare(&self, profile: &ValuationProfile) -> Rational {
        profile
            .iter()
            .enumerate()
            .map(|(i, v)| v.value(self.outcome.get(i)))
            .sum()
    }

    pub fn revenue(&self) -> Rational {
        self.payments.total()
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} paying {}", self.outcome, self.payments)
    }
}

/// Does `profile` satisfy `outcome` at `prices`: every agent values its
/// personal outcome at least at its price.
pub fn satisfies(
    profile: &ValuationProfile,
    outcome: &Outcome,
    prices: &PaymentVector,
) -> Result<bool> {
    if profile.len() != outcome.len() || outcome.len() != prices.len() {
        return Err(Error::structural(format!(
            "satisfies: profile has {} agents, outcome {}, prices {}",
            profile.len(),
            outcome.len(),
            prices.len()
        )));
    }
    for (i, v) in profile.iter().enumerate() {
        let o = outcome.get(i);
        if o >= v.len() {
            return Err(Error::structural(format!(
                "satisfies: agent {i} has no personal outcome {o}"
            )));
        }
    }
    Ok(satisfies_unchecked(profile, outcome, prices))
}

pub(crate) fn satisfies_unchecked(
    profile: &ValuationProfile,
    outcome: &Outcome,
    prices: &PaymentVector,
) -> bool {
    profile
        .iter()
        .enumerate()
        .all(|(i, v)| v.value(outcome.get(i)) >= prices.get(i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn ints(v: &[i128]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::integer(x)).collect()
    }

    #[test]
    fn satisfaction_at_price_equality() {
        let v = item_profile(&ints(&[1, 0]));
        let o = Outcome(vec![1, 0]);
        let p = PaymentVector(ints(&[1, 0]));
        assert!(satisfies(&v, &o, &p).unwrap());
    }

    #[test]
    fn empty_outcome_always_satisfied() {
        let v = item_profile(&ints(&[0, 0, 0]));
        assert!(satisfies(&v, &Outcome::zeros(3), &PaymentVector::zeros(3)).unwrap());
    }

    #[test]
    fn example4_all_three_not_satisfied_by_110() {
        let v = item_profile(&ints(&[1, 1, 0]));
        let o = Outcome(vec![1, 1, 1]);
        let p = PaymentVector(ints(&[1, 1, 1]));
        assert!(!satisfies(&v, &o, &p).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_structural() {
        let v = item_profile(&ints(&[1, 0]));
        let err = satisfies(&v, &Outcome(vec![1]), &PaymentVector(ints(&[1]))).unwrap_err();
        assert!(matches!(err, Error::Structural(_)));
    }

    #[test]
    fn utility_and_welfare() {
        let v = item_profile(&[q(3, 1), q(1, 2)]);
        let d = Decision::new(Outcome(vec![1, 1]), PaymentVector(vec![q(1, 1), q(1, 2)]));
        assert_eq!(d.utility(0, &v[0]), q(2, 1));
        assert_eq!(d.utility(1, &v[1]), Rational::ZERO);
        assert_eq!(d.welfare(&v), q(7, 2));
        assert_eq!(d.revenue(), q(3, 2));
    }
}
