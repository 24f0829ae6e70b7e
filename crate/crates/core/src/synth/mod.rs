//! Constructive directions: decision lists from verified tables, and
//! posted-price paths from single-item lists.

mod decision_list;
mod posted_price;

pub use decision_list::{
    certify_order_oblivious, synthesize_decision_list, synthesize_with, MergedDomain,
    SynthesisOptions, SynthesisTrace, TreeNode, DEFAULT_IMAGE_BOUND,
};
pub use posted_price::{extract_posted_price, DominationOrder};
