use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{satisfies_unchecked, Environment, Grid, Outcome, PaymentVector, TabularMechanism, Valuation};
use crate::verify::{Property, PropertyReport, Witness};

/// Every outcome in the table is always charged the same payment vector.
pub fn check_payment_characterization(tab: &TabularMechanism) -> PropertyReport {
    let grid = tab.grid();
    let mut first: BTreeMap<&Outcome, usize> = BTreeMap::new();
    let mut witness = None;
    for (idx, row) in tab.rows().iter().enumerate() {
        match first.get(&row.outcome) {
            None => {
                first.insert(&row.outcome, idx);
            }
            Some(&k) if tab.row(k).payments != row.payments => {
                witness = Some(Witness {
                    agent: None,
                    profiles: vec![grid.profile(k), grid.profile(idx)],
                    decisions: vec![tab.row(k).clone(), row.clone()],
                    detail: format!(
                        "outcome {} is charged both {} and {}",
                        row.outcome,
                        tab.row(k).payments,
                        row.payments
                    ),
                });
                break;
            }
            Some(_) => {}
        }
    }
    PropertyReport::new(Property::PaymentChar, grid.describe(), witness)
}

/// Outcome -> payment map of a table satisfying the payment characterization.
pub fn price_map(tab: &TabularMechanism) -> Result<BTreeMap<Outcome, PaymentVector>> {
    let report = check_payment_characterization(tab);
    if !report.holds {
        return Err(Error::Prerequisite {
            property: "payment characterization".into(),
            detail: report.witnesses[0].detail.clone(),
        });
    }
    Ok(tab
        .rows()
        .iter()
        .map(|r| (r.outcome.clone(), r.payments.clone()))
        .collect())
}

/// No two profiles both satisfying distinct outcomes `o` and `o'` are
/// mapped one to `o` and the other to `o'`.
pub fn check_consistency(tab: &TabularMechanism) -> Result<PropertyReport> {
    tab.env().require_single_parameter("consistency check")?;
    let prices = price_map(tab)?;
    let grid = tab.grid();
    let image: Vec<(&Outcome, &PaymentVector)> = prices.iter().collect();
    let pos: BTreeMap<&Outcome, usize> = image.iter().enumerate().map(|(k, (o, _))| (*o, k)).collect();
    let m = image.len();
    // chosen[a][b]: first profile mapped to image[a] satisfying both image[a] and image[b].
    let mut chosen: Vec<Vec<Option<usize>>> = vec![vec![None; m]; m];
    for idx in 0..grid.len() {
        let profile = grid.profile(idx);
        let a = pos[&tab.row(idx).outcome];
        if !satisfies_unchecked(&profile, image[a].0, image[a].1) {
            continue;
        }
        for (b, (o, p)) in image.iter().enumerate() {
            if b != a && chosen[a][b].is_none() && satisfies_unchecked(&profile, o, p) {
                chosen[a][b] = Some(idx);
            }
        }
    }
    let mut witness = None;
    'outer: for a in 0..m {
        for b in a + 1..m {
            if let (Some(x), Some(y)) = (chosen[a][b], chosen[b][a]) {
                witness = Some(Witness {
                    agent: None,
                    profiles: vec![grid.profile(x), grid.profile(y)],
                    decisions: vec![tab.row(x).clone(), tab.row(y).clone()],
                    detail: format!(
                        "both profiles satisfy {} and {} but receive different ones",
                        image[a].0, image[b].0
                    ),
                });
                break 'outer;
            }
        }
    }
    Ok(PropertyReport::new(Property::Consistency, grid.describe(), witness))
}

fn dominates_for(v: &Valuation, oi: usize, bound: &Valuation) -> bool {
    (0..v.len()).all(|o2| v.value(oi) - v.value(o2) >= bound.value(oi) - bound.value(o2))
}

/// Every pair of valuations has a common upper bound for every personal outcome.
pub fn check_upper_semilattice(env: &Environment) -> PropertyReport {
    let grid = Grid::from_env(env);
    let mut witness = None;
    'outer: for i in 0..env.n_agents() {
        let types = env.types(i);
        for oi in 0..env.personal_outcomes(i) {
            for (a, v) in types.iter().enumerate() {
                for w in &types[a + 1..] {
                    let ok = types
                        .iter()
                        .any(|u| dominates_for(u, oi, v) && dominates_for(u, oi, w));
                    if !ok {
                        witness = Some(Witness {
                            agent: Some(i),
                            profiles: vec![vec![v.clone()], vec![w.clone()]],
                            decisions: Vec::new(),
                            detail: format!("no common upper bound for personal outcome {oi}"),
                        });
                        break 'outer;
                    }
                }
            }
        }
    }
    PropertyReport::new(Property::Semilattice, grid.describe(), witness)
}
