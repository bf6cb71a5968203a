//! Span-level factuality evaluation for abstractive summaries.
//!
//! The crate implements a QA-based factuality metric end to end
//! (candidate span extraction, question generation, filtering, question
//! answering, answer comparison), exact-match and ingested token-score
//! baselines, threshold tuning and ROC/F1/bootstrap evaluation at both
//! summary and span granularity, and the error-localization analyses
//! (inherited errors in questions, filtered-subset evaluation,
//! human-written question configurations).

pub mod analysis;
pub mod annotate;
pub mod backends;
pub mod baselines;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod exec;
pub mod fixtures;
pub mod humanqg;
pub mod pipeline;
pub mod text;

#[doc(hidden)]
pub mod testutil;

pub use error::{Error, Result};
