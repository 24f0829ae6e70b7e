//! Exact expectations under finite priors, optimal-mechanism searches and
//! the partition instances.

mod distribution;
mod metrics;
mod monte_carlo;
mod partition;
mod search_decision_list;
mod search_posted_price;

pub use distribution::{JointDistribution, WeightedProfile, WeightedValue};
pub use metrics::{
    expected_metrics, expected_metrics_detailed, expected_optimal_welfare, optimal_outcome,
    MechanismMetrics, ProfileMetrics,
};
pub use monte_carlo::{monte_carlo_metrics, MonteCarloEstimate, STREAMS};
pub use partition::{make_partition_instance, PartitionInstance};
pub use search_decision_list::{search_optimal_decision_list, DecisionListLimits, DecisionListSearch};
pub use search_posted_price::{
    default_price_atoms, posted_price_plan_count, search_optimal_posted_price, Objective,
    PostedPriceLimits, PostedPriceSearch,
};
