use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::Result;
use crate::model::{Environment, Valuation};
use crate::rational::Rational;

/// Finite Cartesian product of per-agent valuation lists.
///
/// Profiles are addressed by a flat index in lexicographic order of the
/// per-agent type indices (agent 0 varies slowest).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    types: Vec<Vec<Valuation>>,
    strides: Vec<usize>,
    len: usize,
}

impl Grid {
    pub fn new(types: Vec<Vec<Valuation>>) -> Self {
        let n = types.len();
        let mut strides = vec![1; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * types[i + 1].len();
        }
        let len = types.iter().map(Vec::len).product();
        Grid { types, strides, len }
    }

    pub fn from_env(env: &Environment) -> Self {
        Grid::new(env.all_types().to_vec())
    }

    pub fn n_agents(&self) -> usize {
        self.types.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn types(&self, agent: usize) -> &[Valuation] {
        &self.types[agent]
    }

    pub fn all_types(&self) -> &[Vec<Valuation>] {
        &self.types
    }

    pub fn coord(&self, index: usize, agent: usize) -> usize {
        (index / self.strides[agent]) % self.types[agent].len()
    }

    pub fn coords(&self, index: usize) -> Vec<usize> {
        (0..self.n_agents()).map(|i| self.coord(index, i)).collect()
    }

    pub fn index_of(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.strides).map(|(c, s)| c * s).sum()
    }

    /// Index of the profile equal to `index` except agent `agent` has type `t`.
    pub fn with_coord(&self, index: usize, agent: usize, t: usize) -> usize {
        let cur = self.coord(index, agent);
        index - cur * self.strides[agent] + t * self.strides[agent]
    }

    pub fn profile(&self, index: usize) -> Vec<Valuation> {
        (0..self.n_agents())
            .map(|i| self.types[i][self.coord(index, i)].clone())
            .collect()
    }

    pub fn valuation(&self, index: usize, agent: usize) -> &Valuation {
        &self.types[agent][self.coord(index, agent)]
    }

    pub fn type_index(&self, agent: usize, v: &Valuation) -> Option<usize> {
        self.types[agent].iter().position(|t| t == v)
    }

    /// Flat index of an arbitrary profile, if every coordinate lies on the grid.
    pub fn locate(&self, profile: &[Valuation]) -> Option<usize> {
        if profile.len() != self.n_agents() {
            return None;
        }
        let mut idx = 0;
        for (i, v) in profile.iter().enumerate() {
            idx += self.type_index(i, v)? * self.strides[i];
        }
        Some(idx)
    }

    /// Indices of every profile with agent `agent` fixed to type 0, i.e. one
    /// representative per sub-profile of the other agents.
    pub fn others(&self, agent: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&idx| self.coord(idx, agent) == 0)
    }

    /// Every index that agrees with `base` outside the agents in `free`,
    /// in increasing order.
    pub fn variations(&self, base: usize, free: &[usize]) -> Vec<usize> {
        let mut out = vec![base];
        for &a in free {
            let k = self.types[a].len();
            out = out
                .iter()
                .flat_map(|&idx| (0..k).map(move |t| (idx, t)))
                .map(|(idx, t)| self.with_coord(idx, a, t))
                .collect();
        }
        out.sort_unstable();
        out
    }

    pub fn describe(&self) -> String {
        let mut s = String::new();
        for (i, ts) in self.types.iter().enumerate() {
            if i > 0 {
                s.push_str(" x ");
            }
            let parts: Vec<String> = ts.iter().map(|v| v.to_string()).collect();
            let _ = write!(s, "{{{}}}", parts.join(","));
        }
        let _ = write!(s, " ({} profiles)", self.len);
        s
    }
}

/// Per-agent atom sets that distinguish every satisfaction pattern of the
/// given prices: the environment's atoms, every price atom, 0, and one
/// sentinel strictly above the largest atom.
pub fn build_canonical_grid(env: &Environment, price_atoms: &[Vec<Rational>]) -> Result<Grid> {
    if !env.is_single_parameter() {
        return Ok(Grid::from_env(env));
    }
    let n = env.n_agents();
    let mut types = Vec::with_capacity(n);
    for i in 0..n {
        let mut atoms: BTreeSet<Rational> = env.value_atoms(i).into_iter().collect();
        if let Some(extra) = price_atoms.get(i) {
            for p in extra {
                if p.is_negative() {
                    return Err(crate::Error::validation(
                        format!("prices[{i}]"),
                        format!("negative price {p}"),
                    ));
                }
                atoms.insert(*p);
            }
        }
        atoms.insert(Rational::ZERO);
        let top = *atoms.iter().next_back().expect("nonempty");
        atoms.insert(top + Rational::ONE);
        types.push(atoms.into_iter().map(Valuation::item).collect());
    }
    Ok(Grid::new(types))
}

/// Canonical grid as a new environment whose valuation space is the grid.
pub fn canonical_environment(env: &Environment, price_atoms: &[Vec<Rational>]) -> Result<(Environment, Grid)> {
    let grid = build_canonical_grid(env, price_atoms)?;
    Ok((env.with_types(grid.all_types().to_vec()), grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{enumerate_feasible_outcomes, FeasibilityConstraint};
    use crate::rational::q;

    fn sp_env(atoms: Vec<Vec<Rational>>) -> Environment {
        let n = atoms.len();
        let f = enumerate_feasible_outcomes(&FeasibilityConstraint::Unconstrained { n }).unwrap();
        Environment::single_parameter(atoms, f).unwrap()
    }

    fn item_values(grid: &Grid, agent: usize) -> Vec<Rational> {
        grid.types(agent).iter().map(Valuation::item_value).collect()
    }

    #[test]
    fn union_plus_sentinel() {
        let env = sp_env(vec![vec![q(0, 1), q(2, 1)]]);
        let g = build_canonical_grid(&env, &[vec![q(1, 1)]]).unwrap();
        assert_eq!(item_values(&g, 0), vec![q(0, 1), q(1, 1), q(2, 1), q(3, 1)]);
    }

    #[test]
    fn example4_grid_is_0_1_2() {
        let env = sp_env(vec![vec![q(0, 1), q(1, 1)]; 3]);
        let g = build_canonical_grid(&env, &vec![vec![q(1, 1)]; 3]).unwrap();
        for i in 0..3 {
            assert_eq!(item_values(&g, i), vec![q(0, 1), q(1, 1), q(2, 1)]);
        }
        assert_eq!(g.len(), 27);
    }

    #[test]
    fn correlated_grid_is_0_to_3() {
        let env = sp_env(vec![vec![q(0, 1), q(1, 1), q(2, 1)]; 2]);
        let g = build_canonical_grid(&env, &vec![vec![q(1, 1), q(2, 1)]; 2]).unwrap();
        assert_eq!(item_values(&g, 1), vec![q(0, 1), q(1, 1), q(2, 1), q(3, 1)]);
    }

    #[test]
    fn indexing_round_trips() {
        let env = sp_env(vec![vec![q(0, 1), q(1, 1)], vec![q(0, 1), q(1, 1), q(5, 1)]]);
        let g = Grid::from_env(&env);
        assert_eq!(g.len(), 6);
        for idx in 0..g.len() {
            assert_eq!(g.index_of(&g.coords(idx)), idx);
            assert_eq!(g.locate(&g.profile(idx)), Some(idx));
        }
        assert_eq!(g.coords(5), vec![1, 2]);
        assert_eq!(g.with_coord(5, 0, 0), 2);
        assert_eq!(g.variations(4, &[0]), vec![1, 4]);
        assert_eq!(g.variations(0, &[0, 1]), (0..6).collect::<Vec<_>>());
    }

    proptest::proptest! {
        #[test]
        fn canonical_grid_is_stable(xs in proptest::collection::vec(0i128..6, 1..4), ps in proptest::collection::vec(0i128..6, 0..4)) {
            let mut atoms: Vec<Rational> = xs.iter().map(|&x| Rational::integer(x)).collect();
            atoms.sort();
            atoms.dedup();
            let env = sp_env(vec![atoms]);
            let prices = vec![ps.iter().map(|&p| Rational::integer(p)).collect::<Vec<_>>()];
            let a = build_canonical_grid(&env, &prices).unwrap();
            let b = build_canonical_grid(&env, &prices).unwrap();
            proptest::prop_assert_eq!(a, b);
        }
    }
}
