//! Simulation and analytics for spreading-group information cascades.
//!
//! The crate is split along the data flow:
//!
//! - [`netgen`] builds preferential-attachment graphs, plants a densely
//!   connected spreading group and ranks nodes by eigenvector centrality.
//! - [`cascade`] selects seed sets and runs the retention-decay cascade.
//! - [`sweep`] runs factorial parameter grids of cascades in parallel with
//!   deterministic per-run seeds.
//! - [`tweetlog`] holds the message-log model shared by real retweet data
//!   and simulated traces.
//! - [`pipeline`] turns repeated cascades on one graph into a message log.
//! - [`spreadstats`] computes repetition tables, power-law fits, message
//!   partitions, earliest-spreader recurrence curves and user statistics.

pub mod cascade;
pub mod netgen;
pub mod pipeline;
pub mod seed;
pub mod spreadstats;
pub mod stats;
pub mod sweep;
pub mod tweetlog;

pub use cascade::{CascadeParams, CascadeTrace, DecayClock, Exposure, SeedPolicy};
pub use netgen::{GenParams, Graph};
pub use tweetlog::{MessageLog, MessageRecord};
