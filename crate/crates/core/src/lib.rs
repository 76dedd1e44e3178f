//! Semi-supervised ontology population from word embeddings.
//!
//! Five membership models propose classes for corpus tokens, and an
//! F1-weighted vote picks the final class:
//!
//! - [`models::m1_run`] nearest class vector,
//! - [`models::m2_run`] dissimilar exclusion,
//! - [`models::m3_run`] taxonomy set expansion,
//! - [`models::m4_assign`] and [`models::m5_assign`] for seeded clustering.
//!
//! [`pipeline::run`] wires them together end to end.

pub mod config;
pub mod corpus;
pub mod embeddings;
pub mod ensemble;
pub mod error;
pub mod evaluation;
pub mod fixture;
pub mod models;
pub mod ontology;
pub mod pipeline;
pub mod taxonomy;

pub use error::{Error, Result};
