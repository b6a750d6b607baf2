use dashu_int::IBig;
use serde::Serialize;

use super::check_domain;
use crate::error::Result;
use crate::models::UtilityModel;
use crate::numerics::{binom, binom_column, ExactRational};

/// Which duplication counts a cheat assessment considers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DupScan {
    /// Every `m` in `[0, L - t]`.
    Full,
    /// Only `{0, m'}` when the model claims the limited-duplications property;
    /// otherwise the same as `Full`.
    Hinted,
}

impl DupScan {
    pub(crate) fn limited(self, model: &UtilityModel) -> Option<u64> {
        match self {
            DupScan::Full => None,
            DupScan::Hinted => model.hints().limited_dup,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MValue {
    pub m: u64,
    pub g: ExactRational,
}

/// Result of the cheater's optimisation over `m` at a fixed `(L, t)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheatAssessment {
    pub l: u64,
    pub t: u64,
    /// Smallest maximiser of `g(L, t, m)` over the scanned range.
    pub m_star: u64,
    pub g_star: ExactRational,
    pub f_value: ExactRational,
    /// Set when the scan was cut down by the model's limited-duplications hint.
    pub limited_to: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_m: Option<Vec<MValue>>,
}

impl CheatAssessment {
    /// Weak inequality: an indifferent agent has no strict reason to deviate.
    pub fn in_equilibrium(&self) -> bool {
        self.f_value >= self.g_star
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquilibriumVerdict {
    pub in_equilibrium: bool,
    pub assessment: CheatAssessment,
}

/// `f(L, t)`: honest expected utility with the network size uniform on `[t, L]`.
pub fn honest_utility(l: u64, t: u64, model: &UtilityModel) -> Result<ExactRational> {
    check_domain(l, t)?;
    let total = ExactRational::sum_many((t..=l).map(|x| model.e0_unchecked(x)));
    Ok(total / ExactRational::from(l - t + 1))
}

/// `g(L, t, m)`: expected utility of committing to `m` fake identities,
/// discounted by the chance that none of them collides.
pub fn cheat_utility(l: u64, t: u64, m: u64, model: &UtilityModel) -> Result<ExactRational> {
    check_domain(l, t)?;
    if m == 0 {
        return honest_utility(l, t, model);
    }
    if m > l - t {
        return Ok(ExactRational::zero());
    }
    // C(L - x, m) for x in [t, L - m]
    let free = binom_column(m, l - t);
    let terms = (t..=l - m).map(|x| {
        let ways = ExactRational::from_integer(IBig::from(free[(l - x) as usize].clone()));
        ways * model.em_unchecked(x, m)
    });
    let total = ExactRational::sum_many(terms);
    let all = binom((l - 1) as i64, m as i64);
    let norm = ExactRational::from_integer(IBig::from(all * (l - t + 1)));
    Ok(total / norm)
}

/// The cheater's best response at `(L, t)`. With `keep_table` the value for
/// every scanned `m` is returned as well.
pub fn best_cheat(
    l: u64,
    t: u64,
    model: &UtilityModel,
    scan: DupScan,
    keep_table: bool,
) -> Result<CheatAssessment> {
    check_domain(l, t)?;
    let f_value = honest_utility(l, t, model)?;
    let limited_to = scan.limited(model);
    let candidates: Vec<u64> = match limited_to {
        Some(mp) if mp > 0 => vec![mp],
        Some(_) => Vec::new(),
        None => (1..=l - t).collect(),
    };
    let mut m_star = 0;
    let mut g_star = f_value.clone();
    let mut table = keep_table.then(|| {
        vec![MValue {
            m: 0,
            g: f_value.clone(),
        }]
    });
    for m in candidates {
        let g = cheat_utility(l, t, m, model)?;
        if g > g_star {
            m_star = m;
            g_star = g.clone();
        }
        if let Some(table) = table.as_mut() {
            table.push(MValue { m, g });
        }
    }
    Ok(CheatAssessment {
        l,
        t,
        m_star,
        g_star,
        f_value,
        limited_to,
        per_m: table,
    })
}

/// `f(L, t) >= max_m g(L, t, m)`.
pub fn is_equilibrium(
    l: u64,
    t: u64,
    model: &UtilityModel,
    scan: DupScan,
) -> Result<EquilibriumVerdict> {
    let assessment = best_cheat(l, t, model, scan, false)?;
    Ok(EquilibriumVerdict {
        in_equilibrium: assessment.in_equilibrium(),
        assessment,
    })
}
