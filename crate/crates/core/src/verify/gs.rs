use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Decision, Environment, Grid, PaymentVector, TabularMechanism};
use crate::rational::Rational;
use crate::verify::{check_ic, check_nb, check_payment_characterization, check_upper_semilattice};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GsVerdict {
    Dictatorship(usize),
    TwoOutcomes,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GsClassification {
    pub verdict: GsVerdict,
    /// Distinct (outcome, payments) pairs in the table.
    pub image_size: usize,
}

/// Does the table change when only agent `i`'s report changes?
fn depends_on(tab: &TabularMechanism, i: usize) -> bool {
    let grid = tab.grid();
    (0..grid.len()).any(|idx| {
        (0..grid.types(i).len()).any(|t| tab.row(grid.with_coord(idx, i, t)) != tab.row(idx))
    })
}

/// Dictatorship if exactly one agent's report matters; otherwise two
/// outcomes if the image has at most two pairs. A constant table counts as
/// two outcomes.
pub fn classify_gs(tab: &TabularMechanism) -> Result<GsClassification> {
    if tab.env().is_single_parameter() {
        return Err(Error::Applicability(
            "the dictatorship / two-outcome classification needs a common-outcome environment".into(),
        ));
    }
    let image_size = tab.image().len();
    let relevant: Vec<usize> = (0..tab.n_agents()).filter(|&i| depends_on(tab, i)).collect();
    let verdict = match relevant.as_slice() {
        [i] => GsVerdict::Dictatorship(*i),
        _ if image_size <= 2 => GsVerdict::TwoOutcomes,
        _ => GsVerdict::Neither,
    };
    Ok(GsClassification { verdict, image_size })
}

/// Tally of an exhaustive scan over every table on a small grid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MicroSearchReport {
    pub semilattice: bool,
    pub tables: u64,
    pub ic_nb: u64,
    pub dictatorships: u64,
    pub two_outcomes: u64,
    pub neither: u64,
    /// IC and NB tables whose payments are not a function of the outcome.
    pub payment_char_failures: u64,
    /// First IC and NB table classified as neither, if any.
    pub counterexample: Option<Vec<Decision>>,
}

/// Enumerate every table over `env` with outcomes from the feasible set and
/// each agent's payment drawn from `payment_atoms`.
pub fn gs_micro_search(env: &Environment, payment_atoms: &[Rational], limit: u64) -> Result<MicroSearchReport> {
    if env.is_single_parameter() {
        return Err(Error::Applicability("micro-search needs a common-outcome environment".into()));
    }
    let n = env.n_agents();
    let grid = Grid::from_env(env);
    let mut choices = Vec::new();
    for o in env.feasible().outcomes() {
        let mut pays = vec![Vec::new()];
        for _ in 0..n {
            pays = pays
                .into_iter()
                .flat_map(|p: Vec<Rational>| {
                    payment_atoms.iter().map(move |a| {
                        let mut q = p.clone();
                        q.push(*a);
                        q
                    })
                })
                .collect();
        }
        for p in pays {
            choices.push(Decision::new(o.clone(), PaymentVector(p)));
        }
    }
    let c = choices.len() as u128;
    let total = (0..grid.len()).try_fold(1u128, |acc, _| acc.checked_mul(c));
    let total = match total {
        Some(t) if t <= limit as u128 => t as u64,
        other => {
            return Err(Error::SizeLimit {
                what: "micro-search".into(),
                cardinality: other.map_or_else(|| format!("{c}^{}", grid.len()), |t| t.to_string()),
                limit: limit.to_string(),
            })
        }
    };
    let semilattice = check_upper_semilattice(env).holds;
    let partial = (0..total)
        .into_par_iter()
        .map(|code| {
            let mut rows = Vec::with_capacity(grid.len());
            let mut rest = code;
            for _ in 0..grid.len() {
                rows.push(choices[(rest % c as u64) as usize].clone());
                rest /= c as u64;
            }
            let tab = TabularMechanism::new(env, grid.clone(), rows).expect("rows are feasible");
            let mut r = MicroSearchReport {
                tables: 1,
                ..Default::default()
            };
            if check_ic(&tab).holds && check_nb(&tab).holds {
                r.ic_nb = 1;
                if !check_payment_characterization(&tab).holds {
                    r.payment_char_failures = 1;
                }
                match classify_gs(&tab).expect("common outcome").verdict {
                    GsVerdict::Dictatorship(_) => r.dictatorships = 1,
                    GsVerdict::TwoOutcomes => r.two_outcomes = 1,
                    GsVerdict::Neither => {
                        r.neither = 1;
                        r.counterexample = Some(tab.rows().to_vec());
                    }
                }
            }
            r
        })
        .reduce(MicroSearchReport::default, |a, b| MicroSearchReport {
            semilattice: false,
            tables: a.tables + b.tables,
            ic_nb: a.ic_nb + b.ic_nb,
            dictatorships: a.dictatorships + b.dictatorships,
            two_outcomes: a.two_outcomes + b.two_outcomes,
            neither: a.neither + b.neither,
            payment_char_failures: a.payment_char_failures + b.payment_char_failures,
            counterexample: a.counterexample.or(b.counterexample),
        });
    Ok(MicroSearchReport { semilattice, ..partial })
}
