//! Persuasive signaling schemes on weighted collaboration networks.
//!
//! Agents sit on the vertices of a weighted graph; each task `v` is served once
//! `(Wθ)_v ≥ 1`. A signaling scheme recommends contributions, and is persuasive when
//! following the recommendation is a best response. This crate computes workload
//! benchmarks, builds schemes, certifies persuasiveness exactly and checks dual
//! lower-bound certificates.

pub mod benchmarks;
pub mod constructions;
pub mod error;
pub mod graph;
pub mod lowerbounds;
pub mod lp;
pub mod scalar;
pub mod schemes;

pub use error::{Error, Result};
pub use num_rational::BigRational;
