//! Named reference instances: the three-outcome payment counterexample, the
//! clockwise-first three-agent mechanism, the correlated two-agent prior,
//! partition instances and the two textbook single-item auctions.

use crate::error::Result;
use crate::eval::{make_partition_instance, JointDistribution, PartitionInstance};
use crate::mechanisms::{tabulate, DecisionEntry, DecisionList, Offer, SequentialPostedPrice};
use crate::model::{
    build_canonical_grid, enumerate_feasible_outcomes, Decision, Environment, FeasibilityConstraint,
    FeasibleSet, Outcome, PaymentVector, TabularMechanism, Tiebreak, Valuation,
};
use crate::rational::{q, Rational};

pub const FIXTURE_NAMES: [&str; 6] = ["prop2", "example4", "correlated", "partition", "spa", "fpa"];

/// The ε used in the common-outcome counterexample.
pub fn prop2_epsilon() -> Rational {
    q(1, 100)
}

fn pv(xs: &[i128]) -> PaymentVector {
    PaymentVector(xs.iter().map(|&x| Rational::integer(x)).collect())
}

fn oc(xs: &[usize]) -> Outcome {
    Outcome(xs.to_vec())
}

/// Two agents, three common outcomes, two types each (`x1, x2` and `y1, y2`).
pub fn prop2_env() -> Environment {
    let e = prop2_epsilon();
    let one = Rational::ONE;
    let low = Valuation(vec![one + e, Rational::ZERO, one + e + e]);
    let high = Valuation(vec![one + e, one, e + e]);
    let feasible = FeasibleSet::from_outcomes([oc(&[0, 0]), oc(&[1, 1]), oc(&[2, 2])]);
    Environment::common_outcome(vec![vec![low.clone(), high.clone()], vec![high, low]], 3, feasible)
        .expect("valid fixture")
}

/// IC, IR and NB, yet outcome (0,0) is charged both (1,0) and (0,1).
pub fn prop2() -> TabularMechanism {
    let env = prop2_env();
    // Grid order: (x1,y1), (x1,y2), (x2,y1), (x2,y2).
    let rows = vec![
        Decision::new(oc(&[0, 0]), pv(&[1, 0])),
        Decision::new(oc(&[2, 2]), pv(&[0, 0])),
        Decision::new(oc(&[1, 1]), pv(&[0, 0])),
        Decision::new(oc(&[0, 0]), pv(&[0, 1])),
    ];
    TabularMechanism::over_env(&env, rows).expect("valid fixture")
}

/// Three agents, every allocation feasible, values {0,1}.
pub fn example4_env() -> Environment {
    let feasible = enumerate_feasible_outcomes(&FeasibilityConstraint::Unconstrained { n: 3 }).expect("valid");
    Environment::single_parameter(vec![vec![q(0, 1), q(1, 1)]; 3], feasible).expect("valid fixture")
}

/// Everyone at price 1 if all value at least 1; otherwise the clockwise-first
/// agent with value at least 1, whose counter-clockwise neighbour is below 1.
pub fn clockwise_first(values: &[Rational]) -> Decision {
    let hit: Vec<bool> = values.iter().map(|v| *v >= Rational::ONE).collect();
    let n = hit.len();
    if hit.iter().all(|&h| h) {
        return Decision::new(Outcome(vec![1; n]), PaymentVector(vec![Rational::ONE; n]));
    }
    match (0..n).find(|&i| hit[i] && !hit[(i + n - 1) % n]) {
        Some(i) => {
            let mut p = PaymentVector::zeros(n);
            p.0[i] = Rational::ONE;
            Decision::new(Outcome::unit(n, i), p)
        }
        None => Decision::nothing(n),
    }
}

/// The clockwise-first mechanism tabulated on the canonical grid {0,1,2}³.
pub fn example4() -> TabularMechanism {
    let env = example4_env();
    let grid = build_canonical_grid(&env, &vec![vec![Rational::ONE]; 3]).expect("valid");
    let rows = (0..grid.len())
        .map(|idx| {
            let values: Vec<Rational> = grid.profile(idx).iter().map(Valuation::item_value).collect();
            clockwise_first(&values)
        })
        .collect();
    TabularMechanism::new(&env, grid, rows).expect("valid fixture")
}

/// The hand-written list for the clockwise-first mechanism. Its exceptions only
/// work in this order.
pub fn example4_list() -> DecisionList {
    DecisionList::new(vec![
        DecisionEntry::new(oc(&[1, 1, 1]), pv(&[1, 1, 1])),
        DecisionEntry::new(oc(&[1, 0, 0]), pv(&[1, 0, 0])).with_exceptions(vec![2]),
        DecisionEntry::new(oc(&[0, 0, 1]), pv(&[0, 0, 1])).with_exceptions(vec![3]),
        DecisionEntry::new(oc(&[0, 1, 0]), pv(&[0, 1, 0])).with_exceptions(vec![1]),
        DecisionEntry::new(oc(&[0, 0, 0]), pv(&[0, 0, 0])),
    ])
    .expect("valid fixture")
}

/// Two agents, no constraint, values (1,1), (2,0), (0,2) with mass 1/5, 2/5, 2/5.
pub fn correlated_prior() -> JointDistribution {
    JointDistribution::explicit(vec![
        (vec![q(1, 1), q(1, 1)], q(1, 5)),
        (vec![q(2, 1), q(0, 1)], q(2, 5)),
        (vec![q(0, 1), q(2, 1)], q(2, 5)),
    ])
    .expect("valid fixture")
}

pub fn correlated_env() -> Environment {
    let feasible = enumerate_feasible_outcomes(&FeasibilityConstraint::Unconstrained { n: 2 }).expect("valid");
    Environment::single_parameter(vec![vec![q(0, 1), q(1, 1), q(2, 1)]; 2], feasible).expect("valid fixture")
}

/// Price 1 to agent 0; then price 1 to agent 1 after an acceptance, 2 after a rejection.
pub fn correlated_plan() -> SequentialPostedPrice {
    SequentialPostedPrice::new(
        2,
        Some(
            Offer::new(0, q(1, 1))
                .on_accept(Offer::new(1, q(1, 1)))
                .on_reject(Offer::new(1, q(2, 1))),
        ),
    )
}

/// Full-extraction list for the correlated prior. The trailing empty entry
/// makes it complete off the support.
pub fn correlated_list() -> DecisionList {
    DecisionList::new(vec![
        DecisionEntry::new(oc(&[1, 1]), pv(&[1, 1])),
        DecisionEntry::new(oc(&[1, 0]), pv(&[2, 0])),
        DecisionEntry::new(oc(&[0, 1]), pv(&[0, 2])),
        DecisionEntry::new(oc(&[0, 0]), pv(&[0, 0])),
    ])
    .expect("valid fixture")
}

pub fn partition(num_groups: usize, r: usize, p: Rational) -> Result<PartitionInstance> {
    make_partition_instance(num_groups, r, p)
}

/// Single-item environment over `atoms` for every agent. Agent 0 takes the
/// item on utility ties and the others decline it, which matches index-order
/// tie-breaking in the auctions below.
pub fn auction_env(n: usize, atoms: &[Rational]) -> Result<Environment> {
    let feasible = enumerate_feasible_outcomes(&FeasibilityConstraint::KUniform { n, k: 1 })?;
    let mut tiebreak = vec![Tiebreak::prefer_nothing(); n];
    tiebreak[0] = Tiebreak::prefer_item();
    Environment::single_parameter(vec![atoms.to_vec(); n], feasible)?.with_tiebreak(tiebreak)
}

fn auction(n: usize, atoms: &[Rational], second_price: bool) -> Result<TabularMechanism> {
    let env = auction_env(n, atoms)?;
    let grid = crate::model::Grid::from_env(&env);
    let rows = (0..grid.len())
        .map(|idx| {
            let bids: Vec<Rational> = grid.profile(idx).iter().map(Valuation::item_value).collect();
            // Highest bid wins, lowest index among ties.
            let winner = (0..n).fold(0, |w, i| if bids[i] > bids[w] { i } else { w });
            let price = if second_price {
                (0..n).filter(|&i| i != winner).map(|i| bids[i]).max().unwrap_or(Rational::ZERO)
            } else {
                bids[winner]
            };
            let mut p = PaymentVector::zeros(n);
            p.0[winner] = price;
            Decision::new(Outcome::unit(n, winner), p)
        })
        .collect();
    TabularMechanism::new(&env, grid, rows)
}

/// Second-price auction with index-order tie-breaking.
pub fn spa(n: usize, atoms: &[Rational]) -> Result<TabularMechanism> {
    auction(n, atoms, true)
}

/// First-price auction with index-order tie-breaking.
pub fn fpa(n: usize, atoms: &[Rational]) -> Result<TabularMechanism> {
    auction(n, atoms, false)
}

/// Default two-bidder grid {0,1,2}.
pub fn small_bids() -> Vec<Rational> {
    vec![q(0, 1), q(1, 1), q(2, 1)]
}

/// Tabulate a decision list or plan over the canonical grid of `env`.
pub fn table_of<M: crate::mechanisms::Mechanism + ?Sized>(mech: &M, env: &Environment) -> Result<TabularMechanism> {
    let grid = build_canonical_grid(env, &mech.price_atoms())?;
    tabulate(mech, env, &grid)
}
