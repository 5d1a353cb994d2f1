//! Normalized sum-capacity of interference networks when every node only
//! knows the links within a few hops of itself.
//!
//! The crate covers topology parsing and classification, the linear
//! deterministic channel simulator, independent-graph (MIG) scheduling with
//! exact fractional coloring, coded-set schedules, and the capacity bounds
//! built from them, including the three-user Z-chain regions.

pub mod capacity;
pub mod coded_sets;
pub mod det_channel;
pub mod error;
pub mod lp;
pub mod par;
pub mod rational;
pub mod scheduler;
pub mod topology;

pub use error::{Error, Result};
pub use par::Execution;
pub use rational::Rational;
pub use topology::{Link, Model, Network, Node, Role, TopologyClass};
