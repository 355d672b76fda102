//! Exact interval exchanges, continued fractions and circle exchanges.

mod cf;
mod circle;
mod iet;
mod scalar;

pub use cf::{cf_expand, CfExpansion};
pub use circle::{circle_to_interval, interval_to_circle, CircleExchange};
pub use iet::{reducibility_witness, IdocCertificate, IdocVerdict, Iet};
pub use scalar::{Quadratic, Scalar, MIXED_FIELD_PRECISION};

/// Default depth of the discontinuity-orbit probe.
pub const DEFAULT_IDOC_DEPTH: usize = 10_000;
