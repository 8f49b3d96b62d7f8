//! Exact analysis of choice data under k-th order choice with limited
//! attention: a decision maker maximizes a strict preference over an
//! attention filter that always contains at least `min(|B|, k)` members of the
//! budget `B`.
//!
//! The crate decides rationalizability for any uniform or per-budget
//! threshold ([`solver`]), computes tight minimal lower contour sets and the
//! guaranteed welfare bound ([`welfare`]), checks the complete-domain axioms
//! ([`axioms`]), cross-checks everything against brute force ([`oracle`]) and
//! runs Monte Carlo power studies ([`power`]). Studies are read and written by
//! [`io`].

pub mod altset;
pub mod axioms;
pub mod fixtures;
pub mod io;
pub mod model;
pub mod oracle;
pub mod power;
pub mod relation;
pub mod solver;
pub mod welfare;

pub use altset::{AltSet, MAX_ALTERNATIVES};
pub use model::{
    verify_witness, Alternative, Budget, ChoiceDataset, Observation, PreferenceOrder,
    ProfileError, ThresholdProfile, ValidationError, Witness,
};
pub use solver::{compile, solve_batch, solve_rationalizability, ConstraintProgram, Verdict};
pub use welfare::{guaranteed_welfare_bound, min_lower_contour, WelfareReport};
