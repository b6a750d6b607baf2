use super::{equilibrium_sweep, DupScan};
use crate::error::Result;
use crate::models::UtilityModel;

/// Suggested upper bound on `L` for the brute-force audits (the CLI enforces it).
pub const BRUTE_FORCE_LIMIT: u64 = 500;

/// Smallest `t` from which the indicator stays true, provided the indicator
/// is a single false-to-true step; `None` otherwise. An all-false indicator
/// also yields `None`.
pub fn linear_threshold_pivot(indicator: &[(u64, bool)]) -> Option<u64> {
    let first = indicator.iter().position(|&(_, ok)| ok)?;
    if indicator[first..].iter().all(|&(_, ok)| ok) {
        Some(indicator[first].0)
    } else {
        None
    }
}

/// Audits the linear-threshold claim at one `L` by evaluating every `t` with
/// a full duplication scan.
pub fn verify_linear_threshold(l: u64, model: &UtilityModel) -> Result<bool> {
    let rows = equilibrium_sweep(l, model, DupScan::Full, None)?;
    let indicator: Vec<(u64, bool)> = rows.iter().map(|r| (r.t, r.in_equilibrium)).collect();
    Ok(linear_threshold_pivot(&indicator).is_some())
}

/// Thresholds where "some `m` is profitable" and "`m'` is profitable" disagree.
pub fn limited_dup_counterexamples(l: u64, model: &UtilityModel, m_prime: u64) -> Result<Vec<u64>> {
    let rows = equilibrium_sweep(l, model, DupScan::Full, Some(m_prime))?;
    Ok(rows
        .iter()
        .filter(|r| (r.m_star != 0) != r.probe_profitable.unwrap_or(false))
        .map(|r| r.t)
        .collect())
}

/// Audits the limited-duplications claim `(exists m: g > f) <=> g(m') > f`
/// for every `t` in `[3, L]`.
pub fn verify_limited_dup(l: u64, model: &UtilityModel, m_prime: u64) -> Result<bool> {
    Ok(limited_dup_counterexamples(l, model, m_prime)?.is_empty())
}
