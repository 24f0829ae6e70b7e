use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanisms::{firing_from, tabulate, DecisionEntry, DecisionList};
use crate::model::{item_profile, satisfies_unchecked, Grid, Outcome, PaymentVector, TabularMechanism};
use crate::rational::Rational;
use crate::verify::{check_ic, check_ir, check_nb, price_map, Property, PropertyReport, Witness};

pub const DEFAULT_IMAGE_BOUND: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub domain: Vec<Outcome>,
    /// Coordinate-wise maximum price over the domain.
    pub probe: Vec<Rational>,
    pub outcome: Outcome,
    pub children: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergedDomain {
    pub outcome: Outcome,
    pub domain: Vec<Outcome>,
    pub exceptions: Vec<Outcome>,
}

/// The decision tree behind a synthesized list. Nodes with equal domains
/// are shared, so `tree` is a DAG rooted at index 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisTrace {
    pub tree: Vec<TreeNode>,
    pub merged: Vec<MergedDomain>,
}

#[derive(Clone, Copy, Debug)]
pub struct SynthesisOptions {
    pub image_bound: usize,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            image_bound: DEFAULT_IMAGE_BOUND,
        }
    }
}

fn require(report: PropertyReport) -> Result<()> {
    if report.holds {
        return Ok(());
    }
    Err(Error::Prerequisite {
        property: report.property.to_string(),
        detail: report.witnesses[0].to_string(),
    })
}

struct Builder<'a> {
    tab: &'a TabularMechanism,
    image: Vec<Outcome>,
    prices: Vec<PaymentVector>,
    nodes: Vec<TreeNode>,
    by_domain: BTreeMap<u64, usize>,
}

impl Builder<'_> {
    fn probe(&self, mask: u64) -> Vec<Rational> {
        let n = self.tab.n_agents();
        (0..n)
            .map(|i| {
                (0..self.image.len())
                    .filter(|&k| mask >> k & 1 == 1)
                    .map(|k| self.prices[k].get(i))
                    .max()
                    .unwrap_or(Rational::ZERO)
            })
            .collect()
    }

    fn domain(&self, mask: u64) -> Vec<Outcome> {
        (0..self.image.len())
            .filter(|&k| mask >> k & 1 == 1)
            .map(|k| self.image[k].clone())
            .collect()
    }

    fn node(&mut self, mask: u64) -> Result<usize> {
        if let Some(&id) = self.by_domain.get(&mask) {
            return Ok(id);
        }
        let probe = self.probe(mask);
        let profile = item_profile(&probe);
        let decision = self.tab.lookup(&profile).ok_or_else(|| {
            Error::GridExtension(format!(
                "probe {probe:?} is not on the grid {}; tabulate on the canonical grid",
                self.tab.grid().describe()
            ))
        })?;
        let outcome = decision.outcome.clone();
        let k = self.image.iter().position(|o| *o == outcome).expect("outcome in image");
        let id = self.nodes.len();
        self.nodes.push(TreeNode {
            domain: self.domain(mask),
            probe,
            outcome,
            children: Vec::new(),
        });
        self.by_domain.insert(mask, id);
        let mut children = Vec::new();
        for child in self.maximal_failing_subsets(mask & !(1 << k), k) {
            children.push(self.node(child)?);
        }
        self.nodes[id].children = children;
        Ok(id)
    }

    /// Maximal nonempty subsets of `within` whose probe does not satisfy
    /// `image[target]`, largest first.
    fn maximal_failing_subsets(&self, within: u64, target: usize) -> Vec<u64> {
        let (o, p) = (&self.image[target], &self.prices[target]);
        let mut subsets: Vec<u64> = submasks(within).filter(|&s| s != 0).collect();
        subsets.sort_by_key(|&s| (std::cmp::Reverse(s.count_ones()), s));
        let mut kept: Vec<u64> = Vec::new();
        for s in subsets {
            if kept.iter().any(|&k| s & !k == 0) {
                continue;
            }
            let probe = item_profile(&self.probe(s));
            if !satisfies_unchecked(&probe, o, p) {
                kept.push(s);
            }
        }
        kept
    }
}

fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}

/// Build an order-oblivious decision list implementing an IC, IR and NB table.
pub fn synthesize_decision_list(tab: &TabularMechanism) -> Result<(DecisionList, SynthesisTrace)> {
    synthesize_with(tab, SynthesisOptions::default())
}

pub fn synthesize_with(tab: &TabularMechanism, options: SynthesisOptions) -> Result<(DecisionList, SynthesisTrace)> {
    tab.env().require_single_parameter("decision-list synthesis")?;
    require(check_ic(tab))?;
    require(check_ir(tab))?;
    require(check_nb(tab))?;
    let prices = price_map(tab)?;
    if prices.len() > options.image_bound.min(63) {
        return Err(Error::SizeLimit {
            what: "decision-list synthesis (outcome image)".into(),
            cardinality: prices.len().to_string(),
            limit: options.image_bound.min(63).to_string(),
        });
    }
    let (image, prices): (Vec<Outcome>, Vec<PaymentVector>) = prices.into_iter().unzip();
    let mut b = Builder {
        tab,
        image,
        prices,
        nodes: Vec::new(),
        by_domain: BTreeMap::new(),
    };
    let full = (1u64 << b.image.len()) - 1;
    b.node(full)?;

    let mut merged: BTreeMap<usize, u64> = BTreeMap::new();
    for (&mask, &id) in &b.by_domain {
        let k = b.image.iter().position(|o| *o == b.nodes[id].outcome).expect("in image");
        *merged.entry(k).or_insert(0) |= mask;
    }
    if merged.len() != b.image.len() {
        return Err(Error::Mismatch(format!(
            "decision tree reaches {} of {} outcomes",
            merged.len(),
            b.image.len()
        )));
    }
    let mut order: Vec<usize> = merged.keys().copied().collect();
    order.sort_by(|&x, &y| {
        b.prices[y]
            .total()
            .cmp(&b.prices[x].total())
            .then_with(|| b.image[y].cmp(&b.image[x]))
    });
    let slot: BTreeMap<usize, usize> = order.iter().enumerate().map(|(j, &k)| (k, j)).collect();
    let entries: Vec<DecisionEntry> = order
        .iter()
        .map(|&k| {
            let dom = merged[&k];
            let exceptions = (0..b.image.len())
                .filter(|&x| dom >> x & 1 == 0)
                .map(|x| slot[&x])
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            DecisionEntry::new(b.image[k].clone(), b.prices[k].clone()).with_exceptions(exceptions)
        })
        .collect();
    let list = DecisionList::new(entries)?;

    let back = tabulate(&list, tab.env(), tab.grid())?;
    if let Some(idx) = (0..tab.grid().len()).find(|&i| back.row(i) != tab.row(i)) {
        return Err(Error::Mismatch(format!(
            "synthesized list gives {} at {:?}, table gives {}",
            back.row(idx),
            tab.grid().profile(idx),
            tab.row(idx)
        )));
    }
    let oo = certify_order_oblivious(&list, tab.grid());
    if !oo.holds {
        return Err(Error::Mismatch(format!("synthesized list is not order-oblivious: {}", oo.witnesses[0])));
    }
    let merged = order
        .iter()
        .map(|&k| {
            let dom = merged[&k];
            MergedDomain {
                outcome: b.image[k].clone(),
                domain: b.domain(dom),
                exceptions: b.domain(full & !dom),
            }
        })
        .collect();
    Ok((
        list.claim_order_oblivious(true),
        SynthesisTrace {
            tree: b.nodes,
            merged,
        },
    ))
}

/// Exactly one entry fires at every grid profile.
pub fn certify_order_oblivious(dl: &DecisionList, grid: &Grid) -> PropertyReport {
    let mut witness = None;
    if dl.n_agents() != grid.n_agents() {
        witness = Some(Witness {
            agent: None,
            profiles: Vec::new(),
            decisions: Vec::new(),
            detail: format!("list has {} agents, grid {}", dl.n_agents(), grid.n_agents()),
        });
    } else {
        for idx in 0..grid.len() {
            let profile = grid.profile(idx);
            let sat: Vec<bool> = dl
                .entries()
                .iter()
                .map(|e| satisfies_unchecked(&profile, &e.outcome, &e.prices))
                .collect();
            let firing = firing_from(dl.entries(), &sat);
            if firing.len() != 1 {
                let outcomes: Vec<String> = firing.iter().map(|&j| dl.entries()[j].outcome.to_string()).collect();
                witness = Some(Witness {
                    agent: None,
                    profiles: vec![profile],
                    decisions: Vec::new(),
                    detail: format!("{} entries fire: [{}]", firing.len(), outcomes.join(", ")),
                });
                break;
            }
        }
    }
    PropertyReport::new(Property::OrderOblivious, grid.describe(), witness)
}
