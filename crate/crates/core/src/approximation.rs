//! Closed-form bounds for the leader-election comparison
//! `sum_{x=t}^{L} 1/x  vs  (2/(L-1)) sum_{x=t}^{L} (L-x)/(x+1)`.
//!
//! Both sides are the unnormalised sums: the common factor `1/(L-t+1)` of the
//! expected utilities cancels in the comparison, and every bound here refers
//! to the unnormalised quantity.

use serde::{Serialize, Serializer};

use crate::engine::check_domain;
use crate::error::{Error, Result};
use crate::numerics::{ExactRational, Real, RealContext};
use crate::MIN_NETWORK;

/// Working precision for bound evaluation.
pub const DEFAULT_BITS: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// `f_ub < g_lb`: a single duplication is strictly profitable.
    CertifiedCheat,
    /// `g_ub < f_lb`: no duplication count is profitable.
    CertifiedNoCheat,
    Indeterminate,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::CertifiedCheat => "certified-cheat",
            Self::CertifiedNoCheat => "certified-no-cheat",
            Self::Indeterminate => "indeterminate",
        }
    }
}

/// `ln n + γ + 1/(2n + 1/(1-γ) - 2) <= H_n < ln n + γ + 1/(2n + 1/3)`.
#[derive(Debug, Clone)]
pub struct HarmonicBounds {
    pub lower: Real,
    pub upper: Real,
}

pub fn harmonic_bounds(n: u64) -> Result<HarmonicBounds> {
    harmonic_bounds_with(n, &RealContext::new(DEFAULT_BITS))
}

pub fn harmonic_bounds_with(n: u64, ctx: &RealContext) -> Result<HarmonicBounds> {
    if n < 1 {
        return Err(Error::InvalidConfig("harmonic bounds need n >= 1".into()));
    }
    let k = Constants::new(ctx);
    let two_n = ctx.from_u64(2 * n);
    let base = ctx.ln(n) + &k.gamma;
    let lower = &base + k.one.clone() / (&two_n + &k.c - &k.two);
    let upper = base + k.one.clone() / (two_n + &k.third);
    Ok(HarmonicBounds { lower, upper })
}

struct Constants {
    one: Real,
    two: Real,
    third: Real,
    gamma: Real,
    /// `1 / (1 - γ)`
    c: Real,
}

impl Constants {
    fn new(ctx: &RealContext) -> Self {
        let one = ctx.from_u64(1);
        let gamma = ctx.euler_gamma();
        let c = one.clone() / (one.clone() - &gamma);
        Self {
            two: ctx.from_u64(2),
            third: one.clone() / ctx.from_u64(3),
            one,
            gamma,
            c,
        }
    }
}

/// Bounds on `sum_{x=t}^{L} 1/x = H_L - H_{t-1}` built from the harmonic
/// sandwich at `L` and `t - 1`. Returns `(f_lb, f_ub)`.
pub fn f_bounds_le(l: u64, t: u64) -> Result<(Real, Real)> {
    f_bounds_le_with(l, t, &RealContext::new(DEFAULT_BITS))
}

pub fn f_bounds_le_with(l: u64, t: u64, ctx: &RealContext) -> Result<(Real, Real)> {
    check_domain(l, t)?;
    let k = Constants::new(ctx);
    let big_l = ctx.from_u64(l);
    let s = ctx.from_u64(t - 1);
    let two_l = &big_l * &k.two;
    let two_s = &s * &k.two;
    let seven_thirds = ctx.from_u64(7) / ctx.from_u64(3);
    let log_ratio = ctx.ln(l) - ctx.ln(t - 1);

    let lb_num = &two_s - &two_l - &k.c + &seven_thirds;
    let lb_den = (&two_l + &k.c - &k.two) * (&two_s + &k.third);
    let ub_num = &two_s - &two_l + &k.c - &seven_thirds;
    let ub_den = (&two_l + &k.third) * (&two_s + &k.c - &k.two);
    let f_lb = &log_ratio + lb_num / lb_den;
    let f_ub = log_ratio + ub_num / ub_den;
    Ok((f_lb, f_ub))
}

/// Integral bounds on `(2/(L-1)) sum_{x=t}^{L} (L-x)/(x+1)`. Returns
/// `(g_lb, g_ub)`:
///
/// * `g_lb = (2/(L-1)) ((L+1) ln((L+1)/(t+1)) + (t - L))`
/// * `g_ub = 2 (L+1)/(L-1) ln((L+1)/t) - 2 (L+1-t)/(L-1)`
pub fn g1_bounds_le(l: u64, t: u64) -> Result<(Real, Real)> {
    g1_bounds_le_with(l, t, &RealContext::new(DEFAULT_BITS))
}

pub fn g1_bounds_le_with(l: u64, t: u64, ctx: &RealContext) -> Result<(Real, Real)> {
    check_domain(l, t)?;
    let two = ctx.from_u64(2);
    let l_minus_1 = ctx.from_u64(l - 1);
    let l_plus_1 = ctx.from_u64(l + 1);
    let lb_log = ctx.ln(l + 1) - ctx.ln(t + 1);
    let g_lb = &two / &l_minus_1 * (&l_plus_1 * lb_log - ctx.from_u64(l - t));
    let ub_log = ctx.ln(l + 1) - ctx.ln(t);
    let g_ub = &two * &l_plus_1 / &l_minus_1 * ub_log - &two * ctx.from_u64(l + 1 - t) / &l_minus_1;
    Ok((g_lb, g_ub))
}

/// Exact unnormalised sides of the leader-election comparison at `(L, t)`:
/// `(sum_{x=t}^{L} 1/x, (2/(L-1)) sum_{x=t}^{L} (L-x)/(x+1))`.
pub fn le_unnormalized_sums(l: u64, t: u64) -> Result<(ExactRational, ExactRational)> {
    check_domain(l, t)?;
    let f = ExactRational::sum_many((t..=l).map(ExactRational::reciprocal));
    let g = ExactRational::sum_many(
        (t..=l).map(|x| ExactRational::new(2 * (l - x), (l - 1) * (x + 1))),
    );
    Ok((f, g))
}

fn real_as_f64<S: Serializer>(value: &Real, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    serializer.serialize_f64(value.to_f64().value())
}

/// Bound evaluation at one `(L, t)`; all four values bound unnormalised sums.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub l: u64,
    pub t: u64,
    #[serde(serialize_with = "real_as_f64")]
    pub f_lb: Real,
    #[serde(serialize_with = "real_as_f64")]
    pub f_ub: Real,
    #[serde(serialize_with = "real_as_f64")]
    pub g_lb: Real,
    #[serde(serialize_with = "real_as_f64")]
    pub g_ub: Real,
    #[serde(serialize_with = "real_as_f64")]
    pub euler_gamma: Real,
    pub verdict: Verdict,
    pub normalization: &'static str,
}

pub fn bound_report(l: u64, t: u64) -> Result<BoundReport> {
    let ctx = RealContext::new(DEFAULT_BITS);
    let (f_lb, f_ub) = f_bounds_le_with(l, t, &ctx)?;
    let (g_lb, g_ub) = g1_bounds_le_with(l, t, &ctx)?;
    let verdict = if f_ub < g_lb {
        Verdict::CertifiedCheat
    } else if g_ub < f_lb {
        Verdict::CertifiedNoCheat
    } else {
        Verdict::Indeterminate
    };
    Ok(BoundReport {
        l,
        t,
        f_lb,
        f_ub,
        g_lb,
        g_ub,
        euler_gamma: ctx.euler_gamma(),
        verdict,
        normalization: "unnormalized sums over x in [t, L]",
    })
}

/// Bound reports at `t = floor(0.2 L)` (where cheating is expected) and
/// `t = ceil(0.21 L)` (where it is not). A side whose `t` falls below 3 is
/// absent and counts as indeterminate.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdBand {
    pub l: u64,
    /// The constant-time estimate `L / 5`.
    pub approx_threshold: f64,
    pub cheat_t: u64,
    pub safe_t: u64,
    pub cheat_side: Option<BoundReport>,
    pub safe_side: Option<BoundReport>,
}

impl ThresholdBand {
    pub fn cheat_verdict(&self) -> Verdict {
        self.cheat_side
            .as_ref()
            .map_or(Verdict::Indeterminate, |r| r.verdict)
    }

    pub fn safe_verdict(&self) -> Verdict {
        self.safe_side
            .as_ref()
            .map_or(Verdict::Indeterminate, |r| r.verdict)
    }

    /// The band `[0.2 L, 0.21 L)` is certified when cheating is certified
    /// below it and honesty at its top; anything less is indeterminate.
    pub fn verdict(&self) -> &'static str {
        if self.cheat_verdict() == Verdict::CertifiedCheat
            && self.safe_verdict() == Verdict::CertifiedNoCheat
        {
            "certified"
        } else {
            "indeterminate"
        }
    }
}

pub fn le_threshold_band(l: u64) -> Result<ThresholdBand> {
    crate::engine::check_id_space(l)?;
    let cheat_t = l / 5;
    let safe_t = (21 * l).div_ceil(100);
    let side = |t: u64| -> Result<Option<BoundReport>> {
        if (MIN_NETWORK..=l).contains(&t) {
            bound_report(l, t).map(Some)
        } else {
            Ok(None)
        }
    };
    Ok(ThresholdBand {
        l,
        approx_threshold: l as f64 / 5.0,
        cheat_t,
        safe_t,
        cheat_side: side(cheat_t)?,
        safe_side: side(safe_t)?,
    })
}
