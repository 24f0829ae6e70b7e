use crate::error::{Error, Result};
use crate::model::TabularMechanism;
use crate::verify::{Property, PropertyReport, Witness};

/// Obvious strategyproofness of sequential direct revelation in `order`:
/// once the earlier agents have reported, the worst truthful continuation
/// must be at least as good as the best continuation after any lie.
pub fn check_osp_sequential(tab: &TabularMechanism, order: &[usize]) -> Result<PropertyReport> {
    let n = tab.n_agents();
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&a| a >= n || std::mem::replace(&mut seen[a], true)) {
        return Err(Error::validation("order", format!("{order:?} is not a permutation of 0..{n}")));
    }
    let grid = tab.grid();
    let mut witness = None;
    'outer: for (k, &agent) in order.iter().enumerate() {
        let later = &order[k + 1..];
        let mut free = vec![agent];
        free.extend_from_slice(later);
        for base in 0..grid.len() {
            if free.iter().any(|&a| grid.coord(base, a) != 0) {
                continue;
            }
            for t in 0..grid.types(agent).len() {
                let v = grid.types(agent)[t].clone();
                let truthful = grid.variations(grid.with_coord(base, agent, t), later);
                let (worst, worst_u) = truthful
                    .iter()
                    .map(|&idx| (idx, tab.row(idx).utility(agent, &v)))
                    .min_by_key(|&(_, u)| u)
                    .expect("nonempty");
                for t2 in (0..grid.types(agent).len()).filter(|&t2| t2 != t) {
                    let lies = grid.variations(grid.with_coord(base, agent, t2), later);
                    let (best, best_u) = lies
                        .iter()
                        .map(|&idx| (idx, tab.row(idx).utility(agent, &v)))
                        .max_by_key(|&(_, u)| u)
                        .expect("nonempty");
                    if best_u > worst_u {
                        witness = Some(Witness {
                            agent: Some(agent),
                            profiles: vec![grid.profile(worst), grid.profile(best)],
                            decisions: vec![tab.row(worst).clone(), tab.row(best).clone()],
                            detail: format!(
                                "with true value {v}, worst truthful utility {worst_u} < best utility {best_u} after reporting {}",
                                grid.types(agent)[t2]
                            ),
                        });
                        break 'outer;
                    }
                }
            }
        }
    }
    let mut report = PropertyReport::new(Property::Osp, grid.describe(), witness);
    report.grid = format!("{} in order {order:?}", report.grid);
    Ok(report)
}
