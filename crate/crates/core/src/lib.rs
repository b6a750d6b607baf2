//! Equilibrium thresholds for distributed algorithms run by rational agents
//! that may duplicate themselves (Sybil identities) inside a bounded id space.
//!
//! Given an id space `[1, L]` and a public lower bound `t` on the network size,
//! an agent that fabricates `m` extra identities risks an id collision that
//! aborts the run. The crate computes, exactly, when that risk outweighs the
//! gain and finds the smallest `t` for which honest play is an equilibrium.
//!
//! * [`numerics`]: exact rationals, binomials, harmonic numbers, the
//!   collision-survival probability, and the high-precision float mode.
//! * [`models`]: utility profiles (leader election, knowledge sharing, and
//!   user-supplied models) plus a name-keyed registry.
//! * [`engine`]: honest/cheating expected utilities, equilibrium checks,
//!   minimal-threshold search and audits of the search shortcuts.
//! * [`approximation`]: closed-form bounds and the `t ≈ L/5` leader-election band.
//! * [`simulator`]: Monte Carlo duplication game and a synchronous ring protocol.
//! * [`cli`]: the command-line front end used by the `sybil-threshold` binary.

pub mod approximation;
pub mod cli;
pub mod engine;
pub mod error;
pub mod models;
pub mod numerics;
pub mod simulator;

pub use engine::{
    best_cheat, cheat_utility, honest_utility, is_equilibrium, minimal_threshold,
    verify_limited_dup, verify_linear_threshold, CheatAssessment, DupScan, EquilibriumVerdict,
    SearchMethod, ThresholdMethod, ThresholdOptions, ThresholdResult,
};
pub use error::{Error, Result};
pub use models::{EnhancementHints, ModelRegistry, UtilityModel};
pub use numerics::{binom, collision_survival, harmonic, ExactRational, Precision};

/// Smallest admissible network size and threshold.
pub const MIN_NETWORK: u64 = 3;
