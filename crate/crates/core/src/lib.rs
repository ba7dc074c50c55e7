//! Sample-based online contention resolution for matroids.

pub mod analysis;
pub mod chain;
pub mod engine;
pub mod error;
pub mod harness;
pub mod matroid;
pub mod set;
pub mod stochastic;

pub use error::{OcrsError, Result};
pub use matroid::{MatroidDescriptor, MatroidOracle};
pub use set::{ElemSet, ElementId};
pub use stochastic::{ActiveSampler, ActiveSet, MarginalVector, RngStream};
