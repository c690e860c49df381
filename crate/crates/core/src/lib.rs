//! Audit keyword-based social-media monitors from the log files they leave behind.
//!
//! The crate has three legs:
//!
//! * reverse engineering the keyword lists behind a monitor's search results
//!   ([`inference`], built on the matching semantics in [`textmatch`]),
//! * the corpus plumbing those comparisons need: log/corpus ingestion,
//!   time-window down-sampling and geographic refiltering ([`corpus`], [`geo`]),
//! * a statistical audit battery: inter-rater reliability, chi-squared
//!   comparisons, weighted sampling ([`stats`]).
//!
//! A synthetic monitor ([`simulate`]) provides ground truth so the inference
//! engine's recovery quality is measurable instead of anecdotal.

#![forbid(unsafe_code)]

pub mod config;
pub mod corpus;
pub mod fixtures;
pub mod geo;
pub mod inference;
pub mod simulate;
pub mod stats;
pub mod textmatch;
