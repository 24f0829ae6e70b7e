use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{expected_optimal_welfare, optimal_outcome, JointDistribution};
use crate::mechanisms::{build_full_extraction_list, AnyMechanism, SequentialPostedPrice};
use crate::model::{find_closure_violation, FeasibleSet, Outcome};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogRCase {
    /// OPT is zero; nothing is ever allocated.
    Trivial,
    HighValue,
    Binned,
}

/// The log-r construction with its decomposition of OPT.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogRPlan {
    pub rank: usize,
    pub opt: Rational,
    /// Contribution of allocated values at least `2 OPT`.
    pub opt1: Rational,
    /// Contribution of allocated values in `[OPT/(2r), 2 OPT)`.
    pub opt2: Rational,
    /// Contribution of allocated values below `OPT/(2r)`.
    pub opt3: Rational,
    pub chosen_case: LogRCase,
    /// `bins[j-1]` is the expected optimal value allocated inside
    /// `[2 OPT / 2^j, 2 OPT / 2^(j-1))`, for `j = 1..=bin_count`.
    pub bins: Vec<Rational>,
    pub bin_count: usize,
    pub j_star: Option<usize>,
    /// Price level `2 OPT / 2^j*` of the binned case.
    pub level: Option<Rational>,
    /// Per-agent `Pr[v_i >= 2 OPT]`. Diagnostic only.
    pub alpha: Vec<Rational>,
    /// Welfare guaranteed by the chosen case: `opt1 / 2` or `bins[j*] / 2`.
    pub case_bound: Rational,
    pub mechanism: AnyMechanism,
}

impl LogRPlan {
    /// Combined guarantee `OPT / (8 ceil(log2(4r)))`.
    pub fn combined_bound(&self) -> Rational {
        self.opt / Rational::from(8 * self.bin_count)
    }
}

/// `ceil(log2(x))` for `x >= 1`.
fn ceil_log2(x: usize) -> usize {
    (usize::BITS - (x - 1).leading_zeros()) as usize
}

/// Build the O(log r)-approximate mechanism for an independent prior.
pub fn build_log_r_mechanism(prior: &JointDistribution, feasible: &FeasibleSet) -> Result<LogRPlan> {
    if !prior.is_product() {
        return Err(Error::IndependenceRequired);
    }
    if let Some((member, missing)) = find_closure_violation(feasible) {
        return Err(Error::NotDownwardClosed { member, missing });
    }
    let n = feasible.n_agents();
    let opt = expected_optimal_welfare(prior, feasible)?;
    let rank = feasible.rank().max(1);
    let bin_count = ceil_log2(4 * rank);
    let trivial = AnyMechanism::PostedPrice(SequentialPostedPrice::new(n, None));
    if opt.is_zero() {
        return Ok(LogRPlan {
            rank,
            opt,
            opt1: Rational::ZERO,
            opt2: Rational::ZERO,
            opt3: Rational::ZERO,
            chosen_case: LogRCase::Trivial,
            bins: vec![Rational::ZERO; bin_count],
            bin_count,
            j_star: None,
            level: None,
            alpha: vec![Rational::ZERO; n],
            case_bound: Rational::ZERO,
            mechanism: trivial,
        });
    }

    let two_opt = opt * Rational::integer(2);
    let low = opt / Rational::from(2 * rank);
    let bin_lo = |j: usize| two_opt / Rational::pow2(j as u32);
    let mut opt1 = Rational::ZERO;
    let mut opt2 = Rational::ZERO;
    let mut opt3 = Rational::ZERO;
    let mut bins = vec![Rational::ZERO; bin_count];
    for (v, p) in prior.support() {
        let (o, _) = optimal_outcome(&v, feasible);
        for i in o.winners() {
            let x = v[i];
            if x >= two_opt {
                opt1 += p * x;
            } else if x >= low {
                opt2 += p * x;
            } else {
                opt3 += p * x;
            }
            if let Some(j) = (1..=bin_count).find(|&j| x >= bin_lo(j) && x < bin_lo(j - 1)) {
                bins[j - 1] += p * x;
            }
        }
    }
    let alpha: Vec<Rational> = (0..n).map(|i| prior.prob_in(i, two_opt, None)).collect();

    if opt1 * Rational::integer(4) >= opt {
        let offers: Vec<(usize, Rational)> = (0..n)
            .filter(|&i| feasible.contains(&Outcome::unit(n, i)))
            .map(|i| (i, two_opt))
            .collect();
        return Ok(LogRPlan {
            rank,
            opt,
            opt1,
            opt2,
            opt3,
            chosen_case: LogRCase::HighValue,
            bins,
            bin_count,
            j_star: None,
            level: None,
            alpha,
            case_bound: opt1 / Rational::integer(2),
            mechanism: AnyMechanism::PostedPrice(SequentialPostedPrice::single_item_path(n, &offers)),
        });
    }

    // First maximizing bin wins ties.
    let mut j_star = 1;
    for j in 2..=bin_count {
        if bins[j - 1] > bins[j_star - 1] {
            j_star = j;
        }
    }
    let level = bin_lo(j_star);
    let list = build_full_extraction_list(&vec![level; n], feasible)?;
    Ok(LogRPlan {
        rank,
        opt,
        opt1,
        opt2,
        opt3,
        chosen_case: LogRCase::Binned,
        case_bound: bins[j_star - 1] / Rational::integer(2),
        bins,
        bin_count,
        j_star: Some(j_star),
        level: Some(level),
        alpha,
        mechanism: AnyMechanism::DecisionList(list),
    })
}
