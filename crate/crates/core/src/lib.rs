pub mod capacity;
pub mod dirichlet;
pub mod error;
pub mod field;
pub mod graph;
pub mod potential;
pub mod transition;

pub use error::{CoreError, ErrorClass, Result};
