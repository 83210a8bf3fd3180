//! Privacy protection for data buyers in a data market.
//!
//! A buyer who announces exactly which records it wants reveals its strategy.
//! This crate builds *published intents* (supersets of the true intent) and
//! *purchase sets* (multisets of records) that keep every modeled attacker's
//! confidence about the true intent at or below a threshold λ, while buying as
//! few disguising records as possible.
//!
//! * [`domain`]: categorical data spaces, intents, aggregated datasets, Adult
//!   census preprocessing and a synthetic generator.
//! * [`attacks`]: attacker confidence bounds for the published-intent,
//!   efficiency-maximization and purchased-record-inference attacks.
//! * [`expansion`]: greedy growth of a λ-private published intent.
//! * [`allocation`]: four strategies for a λ-private purchase set.
//! * [`harness`]: experiment runners, table reproduction and CLI plumbing.
//!
//! ```
//! use buyer_privacy::attacks::AttackerKnowledge;
//! use buyer_privacy::domain::{adult_dataset, adult::case_study_intent_size1};
//! use buyer_privacy::expansion::{expand, ExpansionConfig};
//!
//! let data = adult_dataset();
//! let ti = case_study_intent_size1(data.space()).unwrap();
//! let cfg = ExpansionConfig::new(0.3, 0.5, AttackerKnowledge::PI_UNIFORM);
//! let out = expand(&data, &ti, &cfg).unwrap();
//! assert!(out.bounds.upper <= 0.3);
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allocation;
pub mod attacks;
pub mod cli;
pub mod domain;
mod error;
pub mod expansion;
pub mod harness;

pub use error::{Error, Result};
