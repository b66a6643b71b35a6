//! Forensics for coordinated hashtag campaigns driven by pre-written tweet banks.
//!
//! The crate is organised as a pipeline:
//!
//! * [`corpus`] loads tweets, template banks, group-chat messages, rosters and
//!   trend snapshots from line-delimited files.
//! * [`textnorm`] reduces tweet and template text to a shared canonical form.
//! * [`matching`] links tweets to bank templates at the exact, space-less and
//!   fuzzy tiers.
//! * [`alerts`] parses mobilization messages and profiles their senders.
//! * [`detection`] classifies participants and scores hashtags by repeated
//!   content.
//! * [`trends`] builds volume series, detects trend episodes and estimates
//!   collection coverage.
//! * [`syngen`] produces labelled synthetic corpora used for verification.

pub mod alerts;
pub mod corpus;
pub mod detection;
pub mod error;
pub mod matching;
pub mod syngen;
pub mod textnorm;
pub mod time;
pub mod trends;

pub use error::{Error, Result};
