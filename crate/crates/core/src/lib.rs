//! Synthetic social networks driven by per-class "social DNA", graph
//! representatives built from node-similarity measures, and a graph
//! convolutional network harness for node classification on them.

pub mod error;
pub mod exec;
pub mod gcn;
pub mod graph;
pub mod harness;
pub mod rng;
pub mod sdna;
pub mod similarity;

pub use error::{Error, Result};
