mod common;

use std::collections::BTreeSet;

use common::*;
use nonbossy::synth::{certify_order_oblivious, synthesize_decision_list};
use nonbossy::verify::{build_rwsg_witness, check_ic, check_ir, check_nb};
use nonbossy::{
    build_canonical_grid, enumerate_feasible_outcomes, item_profile, q, satisfies, tabulate, tabulate_canonical,
    DecisionList, FeasibilityConstraint, Grid, Outcome, PaymentVector, Rational, TabularMechanism, Valuation,
};
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-40i128..40, 1i128..12).prop_map(|(n, d)| q(n, d))
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, j| acc * (n - j) / (j + 1))
}

fn ic_table(dl: &DecisionList, n: usize) -> Option<TabularMechanism> {
    let env = env_for(&enumerate_feasible_outcomes(&FeasibilityConstraint::Explicit {
        outcomes: dl.entries().iter().map(|e| e.outcome.clone()).collect(),
    })
    .ok()?);
    debug_assert_eq!(env.n_agents(), n);
    let tab = tabulate_canonical(dl, &env).ok()?;
    check_ic(&tab).holds.then_some(tab)
}

fn utility(tab: &TabularMechanism, profile: &[Valuation], agent: usize, v: &Valuation) -> Rational {
    tab.lookup(profile).unwrap().utility(agent, v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_field_laws(a in small_rational(), b in small_rational(), c in small_rational()) {
        prop_assert_eq!(a + b, b + a);
        prop_assert_eq!((a + b) + c, a + (b + c));
        prop_assert_eq!(a * (b + c), a * b + a * c);
        prop_assert_eq!(a - a, Rational::ZERO);
        if !b.is_zero() {
            prop_assert_eq!(a / b * b, a);
        }
        prop_assert_eq!(a < b, a.to_f64() < b.to_f64());
        prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
    }

    #[test]
    fn satisfaction_is_monotone_in_values(
        v in prop::collection::vec(0i128..5, 3),
        bump in prop::collection::vec(0i128..3, 3),
        mask in 0usize..8,
        p in prop::collection::vec(0i128..5, 3),
    ) {
        let o = Outcome((0..3).map(|i| mask >> i & 1).collect());
        let prices = PaymentVector((0..3).map(|i| if o.get(i) == 1 { int(p[i]) } else { Rational::ZERO }).collect());
        let low = item_profile(&v.iter().map(|&x| int(x)).collect::<Vec<_>>());
        let high = item_profile(&v.iter().zip(&bump).map(|(&x, &b)| int(x + b)).collect::<Vec<_>>());
        if satisfies(&low, &o, &prices).unwrap() {
            prop_assert!(satisfies(&high, &o, &prices).unwrap());
        }
    }

    #[test]
    fn k_uniform_counts_subsets(n in 1usize..9, k in 0usize..9) {
        let k = k.min(n);
        let set = enumerate_feasible_outcomes(&FeasibilityConstraint::KUniform { n, k }).unwrap();
        let expected: usize = (0..=k).map(|j| binomial(n, j)).sum();
        prop_assert_eq!(set.len(), expected);
        prop_assert!(set.outcomes().iter().all(|o| o.weight() <= k));
    }

    #[test]
    fn canonical_grid_is_stable_under_refinement(seed in any::<u64>(), n in 2usize..4) {
        let mut r = rng(seed);
        let feasible = random_feasible(&mut r, n, 8);
        let env = env_for(&feasible);
        let dl = random_decision_list(&mut r, &feasible, 0.2);
        let canonical = build_canonical_grid(&env, &dl.price_atoms()).unwrap();
        let coarse = tabulate(&dl, &env, &canonical).unwrap();
        let fine_types: Vec<Vec<Valuation>> = (0..n)
            .map(|i| {
                let mut atoms: BTreeSet<Rational> = BTreeSet::new();
                for v in canonical.types(i) {
                    atoms.insert(v.item_value());
                    atoms.insert(v.item_value() + q(1, 2));
                }
                atoms.into_iter().map(Valuation::item).collect()
            })
            .collect();
        let fine = Grid::new(fine_types);
        let refined = tabulate(&dl, &env, &fine).unwrap();
        for idx in 0..fine.len() {
            let floor: Vec<Valuation> = fine
                .profile(idx)
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    canonical.types(i).iter().rev().find(|c| c.item_value() <= v.item_value()).unwrap().clone()
                })
                .collect();
            prop_assert_eq!(refined.row(idx), coarse.lookup(&floor).unwrap());
        }
        prop_assert_eq!(check_ic(&coarse).holds, check_ic(&refined).holds);
        prop_assert_eq!(check_nb(&coarse).holds, check_nb(&refined).holds);
    }

    #[test]
    fn certificate_exists_exactly_for_ic_bossy_tables(seed in any::<u64>(), n in 2usize..4) {
        let mut r = rng(seed);
        let feasible = random_feasible(&mut r, n, 8);
        let dl = random_decision_list(&mut r, &feasible, 0.3);
        let tab = tabulate_canonical(&dl, &env_for(&feasible)).unwrap();
        let witness = build_rwsg_witness(&tab);
        if !check_ic(&tab).holds {
            prop_assert!(witness.is_err());
            return Ok(());
        }
        let nb = check_nb(&tab).holds;
        let cert = witness.unwrap();
        prop_assert_eq!(cert.is_some(), !nb);
        if let Some(c) = cert {
            let m = c.manipulator;
            let mut truthful = c.fixed_others.clone();
            truthful.insert(m, c.truthful.clone());
            let mut deviated = c.fixed_others.clone();
            deviated.insert(m, c.deviation.clone());
            prop_assert_eq!(tab.lookup(&truthful).unwrap(), &c.before);
            prop_assert_eq!(tab.lookup(&deviated).unwrap(), &c.after);
            prop_assert_eq!(utility(&tab, &truthful, m, &c.truthful), utility(&tab, &deviated, m, &c.truthful));
            prop_assert!(c.is_valid(&tab));
        }
    }

    #[test]
    fn posted_price_plans_are_ic_ir_nb(seed in any::<u64>(), n in 1usize..5) {
        let mut r = rng(seed);
        let plan = random_single_item_plan(&mut r, n);
        let env = env_for(&single_item(n));
        let tab = tabulate_canonical(&plan, &env).unwrap();
        prop_assert!(check_ic(&tab).holds);
        prop_assert!(check_ir(&tab).holds);
        prop_assert!(check_nb(&tab).holds);
    }

    #[test]
    fn order_oblivious_ic_lists_are_nonbossy_and_ir(seed in any::<u64>(), n in 2usize..5) {
        let mut r = rng(seed);
        let feasible = random_feasible(&mut r, n, 8);
        let dl = random_decision_list(&mut r, &feasible, 0.15);
        let tab = tabulate_canonical(&dl, &env_for(&feasible)).unwrap();
        prop_assume!(check_ic(&tab).holds && certify_order_oblivious(&dl, tab.grid()).holds);
        prop_assert!(check_nb(&tab).holds);
        prop_assert!(check_ir(&tab).holds);
    }

    #[test]
    fn exception_free_lists_are_nonbossy(seed in any::<u64>(), n in 2usize..5) {
        let mut r = rng(seed);
        let feasible = random_feasible(&mut r, n, 10);
        let dl = random_decision_list(&mut r, &feasible, 0.0);
        if let Some(tab) = ic_table(&dl, n) {
            prop_assert!(check_nb(&tab).holds);
            prop_assert!(check_ir(&tab).holds);
        }
    }

    #[test]
    fn synthesis_round_trips_ic_nb_tables(seed in any::<u64>(), n in 2usize..4) {
        let mut r = rng(seed);
        let feasible = random_feasible(&mut r, n, 8);
        let dl = random_decision_list(&mut r, &feasible, 0.0);
        let tab = tabulate_canonical(&dl, &env_for(&feasible)).unwrap();
        prop_assume!(check_ic(&tab).holds && check_nb(&tab).holds);
        let (list, _) = synthesize_decision_list(&tab).unwrap();
        let (again, _) = synthesize_decision_list(&tab).unwrap();
        prop_assert_eq!(&list, &again);
        prop_assert!(certify_order_oblivious(&list, tab.grid()).holds);
        let back = tabulate(&list, tab.env(), tab.grid()).unwrap();
        prop_assert_eq!(back.rows(), tab.rows());
        for idx in 0..tab.grid().len() {
            prop_assert_eq!(&list.evaluate(&tab.grid().profile(idx)).unwrap(), tab.row(idx));
        }
    }
}
