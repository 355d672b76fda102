//! Rauzy-Veech induction, its matrix cocycle, towers, Rauzy classes and
//! periodic-type exchanges.

mod class;
mod matrix;
mod periodic;
mod step;
mod trace;

pub use class::{rauzy_class, Pair, RauzyClass};
pub use matrix::{ints_json, IntMatrix};
pub use periodic::{
    balance_check, balance_check_heights, build_periodic_iet, characteristic_polynomial,
    detect_periodic, follow_loop, nu_bar, BalanceReport, PeriodicTypeReport,
};
pub use step::{
    combinatorial_step, first_return_pieces, generic_lengths, rauzy_step, ReturnPiece, StepResult,
    StepType,
};
pub use trace::{
    cut_tower, induce, towers, towers_from_trace, IdentityReport, RauzyTrace, Tower, TowerSet,
    TraceStep,
};
