//! Brute-force property checkers over tabulated mechanisms.
//!
//! Every checker quantifies over the table's grid only; reports name the grid.

mod bossiness;
mod characterization;
mod gs;
mod incentive;
mod osp;
mod report;

pub use bossiness::{build_rwsg_witness, check_nb, ExternalPreference, ManipulationCertificate};
pub use characterization::{
    check_consistency, check_payment_characterization, check_upper_semilattice, price_map,
};
pub use gs::{classify_gs, gs_micro_search, GsClassification, GsVerdict, MicroSearchReport};
pub use incentive::{check_ic, check_ir, check_monotonicity};
pub use osp::check_osp_sequential;
pub use report::{Property, PropertyReport, Witness};
