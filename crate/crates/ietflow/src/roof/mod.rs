//! Roofs with logarithmic singularities at the discontinuities, their
//! ergodic sums, and probes of the monotonicity and derivative estimates
//! those sums satisfy.

mod engine;
mod function;
mod probes;
mod real;

pub use engine::{Branch, Piece, Pos, RoofEngine, Shape, Side};
pub use function::{
    birkhoff, continuity_partition, is_symmetric, make_roof, BirkhoffSum, ContinuityPartition,
    GSpec, Quantity, RoofFunction, TrigTerm, ZeroPattern, CERTIFY_PRECISION,
};
pub use probes::{
    derivative_bound_probe, g_oscillation_probe, monotonicity_probe, DerivativeBoundReport,
    DerivativeBoundRow, GOscillationReport, MonotonicityReport, MonotonicityViolation,
    OscillationRow,
};
pub use real::Real;
