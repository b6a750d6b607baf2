use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{
    best_cheat, check_id_space, equilibrium_sweep, CheatAssessment, DupScan, FloatEvaluator,
};
use crate::error::{Error, Result};
use crate::models::UtilityModel;
use crate::numerics::Precision;
use crate::MIN_NETWORK;

/// Requested search strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMethod {
    /// Binary search when the model claims a linear threshold, scan otherwise.
    #[default]
    Auto,
    Scan,
    Binary,
}

impl FromStr for SearchMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "scan" => Ok(Self::Scan),
            "binary" => Ok(Self::Binary),
            other => Err(Error::InvalidConfig(format!("unknown method `{other}`"))),
        }
    }
}

/// Strategy that actually produced a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ThresholdMethod {
    #[serde(rename = "scan")]
    Scan,
    #[serde(rename = "scan-limited-dup")]
    ScanLimitedDup,
    #[serde(rename = "binary-search")]
    BinarySearch,
    #[serde(rename = "binary-search-limited-dup")]
    BinarySearchLimitedDup,
}

impl ThresholdMethod {
    fn new(binary: bool, limited: bool) -> Self {
        match (binary, limited) {
            (false, false) => Self::Scan,
            (false, true) => Self::ScanLimitedDup,
            (true, false) => Self::BinarySearch,
            (true, true) => Self::BinarySearchLimitedDup,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Scan => "scan",
            Self::ScanLimitedDup => "scan-limited-dup",
            Self::BinarySearch => "binary-search",
            Self::BinarySearchLimitedDup => "binary-search-limited-dup",
        }
    }
}

impl fmt::Display for ThresholdMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certification {
    /// The search's pivot held up under exact evaluation at `t* - 1` and `t*`.
    Certified,
    /// The pivot failed exact certification; the result comes from an exact
    /// full scan and the model's linear-threshold claim is suspect.
    FellBackToScan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThresholdOptions {
    pub method: SearchMethod,
    pub precision: Precision,
    /// Honour the model's limited-duplications hint.
    pub use_hints: bool,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self {
            method: SearchMethod::Auto,
            precision: Precision::Exact,
            use_hints: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThresholdResult {
    pub l: u64,
    pub model: String,
    pub t_star: u64,
    pub method: ThresholdMethod,
    pub precision: Precision,
    pub certification: Certification,
    /// Exact assessment at `t* - 1`; absent when `t* = 3`.
    pub witness_below: Option<CheatAssessment>,
    /// Exact assessment at `t*`.
    pub witness_at: CheatAssessment,
}

impl ThresholdResult {
    pub fn ratio(&self) -> f64 {
        self.t_star as f64 / self.l as f64
    }
}

/// Smallest `t` in `[3, L]` at which the model is in equilibrium, or `None`
/// if no such `t` exists (impossible for the bundled models).
///
/// Binary-search and float-mode results are re-certified exactly at `t* - 1`
/// and `t*`; on failure the answer falls back to an exact full scan and is
/// marked [`Certification::FellBackToScan`].
pub fn minimal_threshold(
    l: u64,
    model: &UtilityModel,
    options: ThresholdOptions,
) -> Result<Option<ThresholdResult>> {
    check_id_space(l)?;
    let scan = if options.use_hints {
        DupScan::Hinted
    } else {
        DupScan::Full
    };
    let binary = match options.method {
        SearchMethod::Auto => model.hints().linear_threshold,
        SearchMethod::Scan => false,
        SearchMethod::Binary => true,
    };

    let candidate = match (binary, options.precision) {
        (false, Precision::Exact) => {
            return exact_scan(l, model, scan, options.precision, Certification::Certified)
        }
        (false, Precision::Float { bits }) => {
            let eval = FloatEvaluator::new(l, model, scan, bits)?;
            eval.sweep()?
                .iter()
                .position(|&ok| ok)
                .map(|i| i as u64 + MIN_NETWORK)
        }
        (true, Precision::Exact) => bisect(l, |t| {
            Ok(best_cheat(l, t, model, scan, false)?.in_equilibrium())
        })?,
        (true, Precision::Float { bits }) => {
            let eval = FloatEvaluator::new(l, model, scan, bits)?;
            bisect(l, |t| eval.in_equilibrium(t))?
        }
    };

    settle(l, model, scan, options.precision, binary, candidate)
}

/// Certifies a search's candidate pivot, or falls back to an exact scan.
fn settle(
    l: u64,
    model: &UtilityModel,
    scan: DupScan,
    precision: Precision,
    binary: bool,
    candidate: Option<u64>,
) -> Result<Option<ThresholdResult>> {
    if let Some(t_star) = candidate {
        if let Some((witness_below, witness_at)) = certify(l, t_star, model, scan)? {
            return Ok(Some(ThresholdResult {
                l,
                model: model.name().to_string(),
                t_star,
                method: ThresholdMethod::new(binary, scan.limited(model).is_some()),
                precision,
                certification: Certification::Certified,
                witness_below,
                witness_at,
            }));
        }
    }
    exact_scan(l, model, scan, precision, Certification::FellBackToScan)
}

/// Smallest `t` with `pred(t)`, assuming a single false-to-true pivot. Returns
/// `None` when even `t = L` fails.
fn bisect(l: u64, mut pred: impl FnMut(u64) -> Result<bool>) -> Result<Option<u64>> {
    if !pred(l)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (MIN_NETWORK, l);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(Some(lo))
}

type Witnesses = (Option<CheatAssessment>, CheatAssessment);

fn certify(l: u64, t_star: u64, model: &UtilityModel, scan: DupScan) -> Result<Option<Witnesses>> {
    let at = best_cheat(l, t_star, model, scan, false)?;
    if !at.in_equilibrium() {
        return Ok(None);
    }
    if t_star == MIN_NETWORK {
        return Ok(Some((None, at)));
    }
    let below = best_cheat(l, t_star - 1, model, scan, false)?;
    if below.in_equilibrium() {
        return Ok(None);
    }
    Ok(Some((Some(below), at)))
}

fn exact_scan(
    l: u64,
    model: &UtilityModel,
    scan: DupScan,
    precision: Precision,
    certification: Certification,
) -> Result<Option<ThresholdResult>> {
    let rows = equilibrium_sweep(l, model, scan, None)?;
    let Some(row) = rows.iter().find(|r| r.in_equilibrium) else {
        return Ok(None);
    };
    let t_star = row.t;
    let witness_at = best_cheat(l, t_star, model, scan, false)?;
    let witness_below = if t_star > MIN_NETWORK {
        Some(best_cheat(l, t_star - 1, model, scan, false)?)
    } else {
        None
    };
    debug_assert!(witness_at.in_equilibrium());
    debug_assert!(witness_below.as_ref().is_none_or(|w| !w.in_equilibrium()));
    Ok(Some(ThresholdResult {
        l,
        model: model.name().to_string(),
        t_star,
        method: ThresholdMethod::new(false, scan.limited(model).is_some()),
        precision,
        certification,
        witness_below,
        witness_at,
    }))
}
