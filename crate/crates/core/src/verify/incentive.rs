use rayon::prelude::*;

use crate::model::TabularMechanism;
use crate::verify::{Property, PropertyReport, Witness};

/// First witness over agents, scanned in parallel and reduced by agent index.
pub(crate) fn first_by_agent<F>(n: usize, scan: F) -> Option<Witness>
where
    F: Fn(usize) -> Option<Witness> + Sync,
{
    (0..n).into_par_iter().map(&scan).collect::<Vec<_>>().into_iter().flatten().next()
}

/// Dominant-strategy incentive compatibility with tiebreaking, plus an
/// allocation-monotonicity sub-report for single-parameter tables.
pub fn check_ic(tab: &TabularMechanism) -> PropertyReport {
    let grid = tab.grid();
    let env = tab.env();
    let witness = first_by_agent(tab.n_agents(), |i| {
        let tb = env.tiebreak(i);
        for idx in 0..grid.len() {
            let t = grid.coord(idx, i);
            let v = grid.valuation(idx, i);
            let truth = tab.row(idx);
            let u = truth.utility(i, v);
            for t2 in (0..grid.types(i).len()).filter(|&t2| t2 != t) {
                let dev_idx = grid.with_coord(idx, i, t2);
                let dev = tab.row(dev_idx);
                let u2 = dev.utility(i, v);
                let gains = u2 > u
                    || (u2 == u && !tb.weakly_prefers(truth.outcome.get(i), dev.outcome.get(i)));
                if gains {
                    return Some(Witness {
                        agent: Some(i),
                        profiles: vec![grid.profile(idx), grid.profile(dev_idx)],
                        decisions: vec![truth.clone(), dev.clone()],
                        detail: format!(
                            "reporting {} instead of {} changes utility {u} -> {u2}",
                            grid.types(i)[t2],
                            v
                        ),
                    });
                }
            }
        }
        None
    });
    let mut report = PropertyReport::new(Property::Ic, grid.describe(), witness);
    if env.is_single_parameter() {
        report.sub_reports.push(check_monotonicity(tab));
    }
    report
}

/// Single-parameter allocation monotonicity: `f_i` nondecreasing in `v_i`.
pub fn check_monotonicity(tab: &TabularMechanism) -> PropertyReport {
    let grid = tab.grid();
    let witness = first_by_agent(tab.n_agents(), |i| {
        for idx in 0..grid.len() {
            let x = grid.valuation(idx, i).item_value();
            if tab.row(idx).outcome.get(i) == 0 {
                continue;
            }
            for t2 in 0..grid.types(i).len() {
                let up = grid.with_coord(idx, i, t2);
                if grid.valuation(up, i).item_value() > x && tab.row(up).outcome.get(i) == 0 {
                    return Some(Witness {
                        agent: Some(i),
                        profiles: vec![grid.profile(idx), grid.profile(up)],
                        decisions: vec![tab.row(idx).clone(), tab.row(up).clone()],
                        detail: "allocation drops when the value rises".into(),
                    });
                }
            }
        }
        None
    });
    PropertyReport::new(Property::Monotonicity, grid.describe(), witness)
}

/// Truthful utility is never negative.
pub fn check_ir(tab: &TabularMechanism) -> PropertyReport {
    let grid = tab.grid();
    let witness = first_by_agent(tab.n_agents(), |i| {
        (0..grid.len()).find_map(|idx| {
            let d = tab.row(idx);
            let u = d.utility(i, grid.valuation(idx, i));
            u.is_negative().then(|| Witness {
                agent: Some(i),
                profiles: vec![grid.profile(idx)],
                decisions: vec![d.clone()],
                detail: format!("truthful utility {u} is negative"),
            })
        })
    });
    PropertyReport::new(Property::Ir, grid.describe(), witness)
}
