//! Structure computations for weighted Cuntz-Krieger algebras of finite
//! directed graphs with eventually periodic weights.

pub mod error;
pub mod findim;
pub mod fock;
pub mod calkin;
pub mod cycle;
pub mod graph;
pub mod ideals;
pub mod linalg;
pub mod manifest;
pub mod tower;
pub mod weights;

pub use error::{Error, Result};
