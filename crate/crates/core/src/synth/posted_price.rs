use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanisms::{tabulate, DecisionList, SequentialPostedPrice};
use crate::model::{build_canonical_grid, item_profile, render_profile, Environment, Outcome};
use crate::rational::Rational;

/// Domination among the agents that can win, in list order of `agents`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominationOrder {
    pub agents: Vec<usize>,
    /// `relation[a][b]`: `agents[a]` dominates `agents[b]`.
    pub relation: Vec<Vec<bool>>,
    /// Visit order, most dominant first.
    pub order: Vec<usize>,
}

/// Turn a single-item decision list into the equivalent sequential posted-price path.
pub fn extract_posted_price(dl: &DecisionList, env: &Environment) -> Result<(SequentialPostedPrice, DominationOrder)> {
    env.require_single_parameter("posted-price extraction")?;
    if !env.feasible().is_single_item() {
        return Err(Error::Applicability(
            "posted-price extraction needs a single-item environment".into(),
        ));
    }
    dl.validate(env)?;
    let n = env.n_agents();
    let grid = build_canonical_grid(env, &dl.price_atoms())?;
    let tab = tabulate(dl, env, &grid)?;
    let winners: Vec<usize> = (0..n)
        .filter(|&i| tab.rows().iter().any(|r| r.outcome.get(i) == 1))
        .collect();

    let pos: Vec<usize> = winners
        .iter()
        .map(|&i| dl.position(&Outcome::unit(n, i)).expect("allocated outcome is listed"))
        .collect();
    let q: Vec<Rational> = winners
        .iter()
        .zip(&pos)
        .map(|(&i, &j)| dl.entries()[j].prices.get(i))
        .collect();
    let in_exceptions = |a: usize, b: usize| dl.entries()[pos[b]].exceptions.contains(&pos[a]);
    let m = winners.len();

    for a in 0..m {
        for b in a + 1..m {
            if in_exceptions(a, b) && in_exceptions(b, a) {
                let mut v = vec![Rational::ZERO; n];
                v[winners[a]] = q[a];
                v[winners[b]] = q[b];
                return Err(Error::MutualExceptions {
                    first: winners[a],
                    second: winners[b],
                    witness: render_profile(&item_profile(&v)),
                });
            }
        }
    }
    let relation: Vec<Vec<bool>> = (0..m)
        .map(|a| {
            (0..m)
                .map(|b| a != b && (in_exceptions(a, b) || (pos[a] < pos[b] && !in_exceptions(b, a))))
                .collect()
        })
        .collect();
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                if relation[a][b] && relation[b][c] && relation[c][a] {
                    return Err(Error::DominationCycle(winners[a], winners[b], winners[c]));
                }
            }
        }
    }
    let mut ranked: Vec<usize> = (0..m).collect();
    ranked.sort_by_key(|&a| std::cmp::Reverse(relation[a].iter().filter(|&&d| d).count()));
    let order: Vec<usize> = ranked.iter().map(|&a| winners[a]).collect();
    let offers: Vec<(usize, Rational)> = ranked.iter().map(|&a| (winners[a], q[a])).collect();
    let plan = SequentialPostedPrice::single_item_path(n, &offers);

    let back = tabulate(&plan, env, &grid)?;
    if let Some(idx) = (0..grid.len()).find(|&i| back.row(i) != tab.row(i)) {
        return Err(Error::Mismatch(format!(
            "extracted plan gives {} at {}, list gives {}",
            back.row(idx),
            render_profile(&grid.profile(idx)),
            tab.row(idx)
        )));
    }
    Ok((
        plan,
        DominationOrder {
            agents: winners,
            relation,
            order,
        },
    ))
}
