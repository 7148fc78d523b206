//! Numerical claim detection for financial text.
//!
//! The pipeline segments documents into sentences, keeps the numeric
//! financial ones, labels each as in-claim or out-of-claim with a set of
//! labeling rules and an expert-ordered aggregator, scores document optimism,
//! and relates that optimism to earnings surprise and abnormal returns.

pub mod corpus;
pub mod error;
pub mod market;
pub mod sentiment;
pub mod synth;
pub mod textproc;
pub mod weaklabel;

pub use error::{Error, Result};
