//! Temporal sense graphs.
//!
//! Time-sliced distributional thesauri are merged into a single
//! neighbourhood graph over time for a target word, clustered into senses
//! with Chinese Whispers, and analysed for sense emergence and demise.
//!
//! ```text
//! store (intervals, similarity, features, sentences)
//!   -> ngot::build_ngot -> cluster::chinese_whispers
//!   -> analytics::{time_diff, interval_slice, betweenness, score_series}
//!   -> evidence::{rank_features, fetch_evidence}
//! ```

pub mod analytics;
pub mod cluster;
pub mod config;
pub mod error;
pub mod evidence;
pub mod ngot;
pub mod pipeline;
pub mod service;
pub mod store;
pub mod synthetic;
pub mod thesaurus;
mod tsv;

pub use error::{Error, Result};
