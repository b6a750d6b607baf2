//! Expected utilities of honest and duplicating agents, equilibrium decisions
//! and the minimal-threshold search.
//!
//! Two independent exact routes exist. [`honest_utility`] and
//! [`cheat_utility`] sum canonical rationals term by term; the sweep used by
//! scans and audits keeps every quantity as an integer over one common
//! denominator and compares by cross-multiplication. Tests hold the two
//! routes against each other.

mod float;
mod search;
mod sweep;
mod utility;
mod verify;

pub use float::FloatEvaluator;
pub use search::{
    minimal_threshold, Certification, SearchMethod, ThresholdMethod, ThresholdOptions,
    ThresholdResult,
};
pub use sweep::{equilibrium_sweep, equilibrium_sweep_from, SweepRow};
pub use utility::{
    best_cheat, cheat_utility, honest_utility, is_equilibrium, CheatAssessment, DupScan,
    EquilibriumVerdict, MValue,
};
pub use verify::{
    limited_dup_counterexamples, linear_threshold_pivot, verify_limited_dup,
    verify_linear_threshold, BRUTE_FORCE_LIMIT,
};

use crate::error::{Error, Result};
use crate::MIN_NETWORK;

pub(crate) fn check_id_space(l: u64) -> Result<()> {
    if l < MIN_NETWORK {
        return Err(Error::IdSpaceTooSmall(l));
    }
    Ok(())
}

pub(crate) fn check_domain(l: u64, t: u64) -> Result<()> {
    check_id_space(l)?;
    if !(MIN_NETWORK..=l).contains(&t) {
        return Err(Error::ThresholdOutOfRange { l, t });
    }
    Ok(())
}
