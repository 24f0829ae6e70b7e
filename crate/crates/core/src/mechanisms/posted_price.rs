use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Decision, Environment, Outcome, PaymentVector, ValuationProfile};
use crate::rational::Rational;

/// A take-it-or-leave-it offer and the continuation after each answer.
/// `None` children end the mechanism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Offer {
    pub agent: usize,
    pub price: Rational,
    #[serde(default)]
    pub accept: Option<Box<Offer>>,
    #[serde(default)]
    pub reject: Option<Box<Offer>>,
}

impl Offer {
    pub fn new(agent: usize, price: Rational) -> Self {
        Offer {
            agent,
            price,
            accept: None,
            reject: None,
        }
    }

    pub fn on_accept(mut self, next: Offer) -> Self {
        self.accept = Some(Box::new(next));
        self
    }

    pub fn on_reject(mut self, next: Offer) -> Self {
        self.reject = Some(Box::new(next));
        self
    }
}

/// Adaptive sequential posted-price mechanism as a decision tree over
/// accept/reject histories. Agents accept at price equality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequentialPostedPrice {
    agents: usize,
    plan: Option<Box<Offer>>,
}

impl SequentialPostedPrice {
    pub fn new(agents: usize, plan: Option<Offer>) -> Self {
        SequentialPostedPrice {
            agents,
            plan: plan.map(Box::new),
        }
    }

    /// Non-adaptive single-item path: offer to each `(agent, price)` in order
    /// and stop at the first acceptance.
    pub fn single_item_path(agents: usize, offers: &[(usize, Rational)]) -> Self {
        let mut next: Option<Offer> = None;
        for &(agent, price) in offers.iter().rev() {
            let mut o = Offer::new(agent, price);
            o.reject = next.map(Box::new);
            next = Some(o);
        }
        SequentialPostedPrice::new(agents, next)
    }

    pub fn n_agents(&self) -> usize {
        self.agents
    }

    pub fn root(&self) -> Option<&Offer> {
        self.plan.as_deref()
    }

    /// Agents in the order they are visited along the all-reject path,
    /// followed by never-visited agents in index order.
    pub fn visit_order(&self) -> Vec<usize> {
        let mut order = Vec::new();
        let mut node = self.root();
        while let Some(o) = node {
            if !order.contains(&o.agent) {
                order.push(o.agent);
            }
            node = o.reject.as_deref();
        }
        for i in 0..self.agents {
            if !order.contains(&i) {
                order.push(i);
            }
        }
        order
    }

    /// Check that no agent is revisited and every accept set stays feasible.
    pub fn validate(&self, env: &Environment) -> Result<()> {
        env.require_single_parameter("posted-price plan")?;
        if env.n_agents() != self.agents {
            return Err(Error::structural(format!(
                "plan has {} agents, environment {}",
                self.agents,
                env.n_agents()
            )));
        }
        let mut visited = vec![false; self.agents];
        let mut accepted = Outcome::zeros(self.agents);
        self.validate_node(self.root(), env, &mut visited, &mut accepted, "plan")
    }

    fn validate_node(
        &self,
        node: Option<&Offer>,
        env: &Environment,
        visited: &mut [bool],
        accepted: &mut Outcome,
        path: &str,
    ) -> Result<()> {
        let Some(o) = node else { return Ok(()) };
        if o.agent >= self.agents {
            return Err(Error::structural(format!("{path}: agent {} out of range", o.agent)));
        }
        if visited[o.agent] {
            return Err(Error::structural(format!("{path}: agent {} visited twice", o.agent)));
        }
        if o.price.is_negative() {
            return Err(Error::structural(format!("{path}: negative price {}", o.price)));
        }
        accepted.0[o.agent] = 1;
        let feasible = env.feasible().contains(accepted);
        if !feasible {
            return Err(Error::structural(format!(
                "{path}: accept set {accepted} after offering to agent {} is infeasible",
                o.agent
            )));
        }
        visited[o.agent] = true;
        self.validate_node(o.accept.as_deref(), env, visited, accepted, &format!("{path}.accept"))?;
        accepted.0[o.agent] = 0;
        self.validate_node(o.reject.as_deref(), env, visited, accepted, &format!("{path}.reject"))?;
        visited[o.agent] = false;
        Ok(())
    }

    /// Walk the plan on a profile.
    pub fn evaluate(&self, profile: &ValuationProfile) -> Result<Decision> {
        if profile.len() != self.agents {
            return Err(Error::structural(format!(
                "profile has {} agents, plan {}",
                profile.len(),
                self.agents
            )));
        }
        let mut visited = vec![false; self.agents];
        let mut outcome = Outcome::zeros(self.agents);
        let mut payments = PaymentVector::zeros(self.agents);
        let mut node = self.root();
        while let Some(o) = node {
            if o.agent >= self.agents || visited[o.agent] {
                return Err(Error::structural(format!(
                    "plan revisits or names invalid agent {}",
                    o.agent
                )));
            }
            visited[o.agent] = true;
            if profile[o.agent].item_value() >= o.price {
                outcome.0[o.agent] = 1;
                payments.0[o.agent] = o.price;
                node = o.accept.as_deref();
            } else {
                node = o.reject.as_deref();
            }
        }
        Ok(Decision::new(outcome, payments))
    }

    pub fn price_atoms(&self) -> Vec<Vec<Rational>> {
        let mut sets = vec![std::collections::BTreeSet::new(); self.agents];
        fn walk(node: Option<&Offer>, sets: &mut [std::collections::BTreeSet<Rational>]) {
            if let Some(o) = node {
                if o.agent < sets.len() {
                    sets[o.agent].insert(o.price);
                }
                walk(o.accept.as_deref(), sets);
                walk(o.reject.as_deref(), sets);
            }
        }
        walk(self.root(), &mut sets);
        sets.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    /// Number of offer nodes.
    pub fn size(&self) -> usize {
        fn count(node: Option<&Offer>) -> usize {
            node.map_or(0, |o| 1 + count(o.accept.as_deref()) + count(o.reject.as_deref()))
        }
        count(self.root())
    }
}
