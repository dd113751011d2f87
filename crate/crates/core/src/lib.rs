//! Lovász-theta product-state lower bounds for quantum Max Cut.

pub mod error;
pub mod gp;
pub mod graph;
pub mod numerics;
pub mod report;
pub mod rounding;
pub mod specialfn;
pub mod spectrum;
pub mod theta;

pub use error::{Error, Result};
pub use graph::Graph;
