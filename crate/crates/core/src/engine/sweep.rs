use dashu_int::{IBig, UBig};
use serde::Serialize;

use super::{check_id_space, DupScan};
use crate::error::{Error, Result};
use crate::models::UtilityModel;
use crate::numerics::{binom, lcm_accumulate, ExactRational};
use crate::MIN_NETWORK;

/// Equilibrium status at one threshold, as produced by [`equilibrium_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub t: u64,
    pub in_equilibrium: bool,
    /// Smallest maximiser of `g(L, t, m)` over the scanned `m`.
    pub m_star: u64,
    /// Whether `g(L, t, probe) > f(L, t)`, when a probe count was requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe_profitable: Option<bool>,
}

struct Candidate {
    m: u64,
    /// Part of the cheater's scan (as opposed to a probe-only count).
    scanned: bool,
    /// `C(L - 1, m)`, the shared denominator of `p_m(x)`.
    all_ids: IBig,
    /// `C(L - x, m)` at the current `x = t`.
    free_ids: UBig,
    /// `sum_{x >= t} C(L - x, m) * em(x, m) * D`.
    total: IBig,
}

/// Equilibrium status for every `t` in `[3, L]`, in ascending `t`.
///
/// Runs `t` downward from `L`, extending one suffix sum per duplication count,
/// so the whole table costs `O(L * |M|)` big-integer operations. All values
/// are integers over the common denominator `D * (L - t + 1)`, where `D` is
/// the lcm of every utility denominator in the domain; comparisons use cross
/// multiplication and are exact.
///
/// `probe` additionally records whether that single duplication count is
/// profitable at each `t` (it is scanned even under a hint that excludes it).
pub fn equilibrium_sweep(
    l: u64,
    model: &UtilityModel,
    scan: DupScan,
    probe: Option<u64>,
) -> Result<Vec<SweepRow>> {
    equilibrium_sweep_from(l, model, scan, probe, MIN_NETWORK)
}

/// [`equilibrium_sweep`] restricted to `t` in `[t_min, L]`. Duplication
/// counts above `L - t_min` cannot fit and are never evaluated.
pub fn equilibrium_sweep_from(
    l: u64,
    model: &UtilityModel,
    scan: DupScan,
    probe: Option<u64>,
    t_min: u64,
) -> Result<Vec<SweepRow>> {
    check_id_space(l)?;
    let t_min = t_min.max(MIN_NETWORK);
    if t_min > l {
        return Err(Error::ThresholdOutOfRange { l, t: t_min });
    }
    let max_m = l - t_min;
    let limited = scan.limited(model);
    let mut counts: Vec<u64> = match limited {
        Some(mp) => vec![mp],
        None => (1..=max_m).collect(),
    };
    if let Some(p) = probe {
        counts.push(p);
    }
    counts.retain(|&m| (1..=max_m).contains(&m));
    counts.sort_unstable();
    counts.dedup();
    let scanned = |m: u64| limited.is_none_or(|mp| mp == m);

    let mut common = UBig::ONE;
    for x in t_min..=l {
        common = lcm_accumulate(common, model.e0_unchecked(x).denominator());
    }
    for &m in &counts {
        for x in t_min..=l - m {
            common = lcm_accumulate(common, model.em_unchecked(x, m).denominator());
        }
    }
    let scaled = |r: ExactRational| -> IBig {
        let (num, den) = r.into_parts();
        num * IBig::from(&common / &den)
    };

    let mut candidates: Vec<Candidate> = counts
        .iter()
        .map(|&m| Candidate {
            m,
            scanned: scanned(m),
            all_ids: IBig::from(binom((l - 1) as i64, m as i64)),
            free_ids: UBig::ZERO,
            total: IBig::ZERO,
        })
        .collect();

    let mut honest_total = IBig::ZERO;
    let mut rows = Vec::with_capacity((l - t_min + 1) as usize);
    for t in (t_min..=l).rev() {
        honest_total += scaled(model.e0_unchecked(t));
        let spare = l - t;
        for c in candidates.iter_mut().filter(|c| c.m <= spare) {
            c.free_ids = if spare == c.m {
                UBig::ONE
            } else {
                &c.free_ids * spare / (spare - c.m)
            };
            c.total += IBig::from(c.free_ids.clone()) * scaled(model.em_unchecked(t, c.m));
        }

        let m_star = best_response(&candidates, spare, &honest_total);
        let probe_profitable = probe.map(|p| {
            candidates
                .iter()
                .find(|c| c.m == p && c.m <= spare)
                .is_some_and(|c| c.total > &honest_total * &c.all_ids)
        });
        rows.push(SweepRow {
            t,
            in_equilibrium: m_star == 0,
            m_star,
            probe_profitable,
        });
    }
    rows.reverse();
    Ok(rows)
}

/// Smallest maximiser among the scanned counts still in range at this `t`.
fn best_response(candidates: &[Candidate], spare: u64, honest: &IBig) -> u64 {
    let mut best_m = 0;
    let mut best_num = honest;
    let mut best_den = None::<&IBig>;
    for c in candidates.iter().filter(|c| c.scanned && c.m <= spare) {
        // c.total / c.all_ids > best_num / best_den
        let lhs = match best_den {
            Some(d) => &c.total * d,
            None => c.total.clone(),
        };
        if lhs > best_num * &c.all_ids {
            best_m = c.m;
            best_num = &c.total;
            best_den = Some(&c.all_ids);
        }
    }
    best_m
}
