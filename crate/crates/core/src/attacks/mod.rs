//! Attacker models and their confidence bounds.
//!
//! Three observers are modeled. The *PI-uniform* attacker sees the published
//! intent only. The *efficiency-maximization* attacker also knows the data
//! density and/or record prices and bets that the buyer spends efficiently.
//! The *purchased-record inference* attacker sees the purchased multiset,
//! reconstructs a pseudo published intent and flags over-represented cells.

mod bounds;
mod knowledge;
pub mod pri;
pub mod pvalue;

pub use bounds::{
    conf_em_upper, conf_em_worst_case, conf_pi_uniform, em_intent_upper, intent_bounds,
    within_threshold, ConfidenceBounds, LAMBDA_SLACK,
};
pub use knowledge::AttackerKnowledge;
pub use pri::{
    assess_purchase, conditional_density, conf_pri, empirical_dist, infer_pseudo_pi, pvalue,
    CellAssessment, PurchaseSet,
};
pub use pvalue::{binomial_upper_tail, PValueConfig, PValueMode};
