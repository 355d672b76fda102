//! Interval exchange transformations, Rauzy-Veech induction and special flows
//! under logarithmic roof functions, with numerical probes of strip measures
//! and Birkhoff-sum distributions.

mod error;
pub mod iet_core;
pub mod partitions;
pub mod rauzy;
pub mod rigidity_probe;
pub mod roof;
pub mod special_flow;

pub use error::{Error, Result};
pub use iet_core::{Iet, Scalar};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
