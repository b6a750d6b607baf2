use super::{check_domain, check_id_space, DupScan};
use crate::error::Result;
use crate::models::UtilityModel;
use crate::numerics::{binom, Real, RealContext};
use crate::MIN_NETWORK;

/// Floating-point evaluation of `f` and `g` at a configurable precision, used
/// to steer threshold searches at large `L`. Verdicts from here are never
/// reported on their own; the search re-certifies them exactly.
#[derive(Debug, Clone)]
pub struct FloatEvaluator<'a> {
    l: u64,
    model: &'a UtilityModel,
    scan: DupScan,
    ctx: RealContext,
}

impl<'a> FloatEvaluator<'a> {
    pub fn new(l: u64, model: &'a UtilityModel, scan: DupScan, bits: usize) -> Result<Self> {
        check_id_space(l)?;
        Ok(Self {
            l,
            model,
            scan,
            ctx: RealContext::new(bits),
        })
    }

    fn counts(&self, t: u64) -> Vec<u64> {
        let spare = self.l - t;
        match self.scan.limited(self.model) {
            Some(mp) if (1..=spare).contains(&mp) => vec![mp],
            Some(_) => Vec::new(),
            None => (1..=spare).collect(),
        }
    }

    /// `sum_{x=t}^{L} e0(x)`.
    pub fn honest_sum(&self, t: u64) -> Result<Real> {
        check_domain(self.l, t)?;
        let mut acc = self.ctx.from_u64(0);
        for x in t..=self.l {
            acc += self.ctx.from_rational(&self.model.e0_unchecked(x));
        }
        Ok(acc)
    }

    /// `sum_{x=t}^{L-m} p_m(x) em(x, m)`, walking `x` down from `L - m` with
    /// `p_m(x - 1) = p_m(x) (L - x + 1) / (L - x + 1 - m)`.
    pub fn cheat_sum(&self, t: u64, m: u64) -> Result<Real> {
        check_domain(self.l, t)?;
        if m == 0 {
            return self.honest_sum(t);
        }
        let l = self.l;
        if m > l - t {
            return Ok(self.ctx.from_u64(0));
        }
        let all = binom((l - 1) as i64, m as i64);
        let mut survival = self.ctx.ratio(&1u8.into(), &all);
        let mut acc = self.ctx.from_u64(0);
        let mut x = l - m;
        loop {
            acc += &survival * self.ctx.from_rational(&self.model.em_unchecked(x, m));
            if x == t {
                break;
            }
            let free = l - x + 1;
            survival = survival * self.ctx.from_u64(free) / self.ctx.from_u64(free - m);
            x -= 1;
        }
        Ok(acc)
    }

    pub fn in_equilibrium(&self, t: u64) -> Result<bool> {
        let honest = self.honest_sum(t)?;
        for m in self.counts(t) {
            if self.cheat_sum(t, m)? > honest {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Equilibrium indicator for every `t` in `[3, L]`, ascending, via
    /// descending suffix sums.
    pub fn sweep(&self) -> Result<Vec<bool>> {
        let l = self.l;
        let max_m = l - MIN_NETWORK;
        let counts: Vec<u64> = match self.scan.limited(self.model) {
            Some(mp) if (1..=max_m).contains(&mp) => vec![mp],
            Some(_) => Vec::new(),
            None => (1..=max_m).collect(),
        };
        // survival[i] holds p_m(t) for m = counts[i] once active
        let mut survival: Vec<Option<Real>> = vec![None; counts.len()];
        let mut totals: Vec<Real> = vec![self.ctx.from_u64(0); counts.len()];
        let mut honest = self.ctx.from_u64(0);
        let mut out = Vec::with_capacity((l - MIN_NETWORK + 1) as usize);
        for t in (MIN_NETWORK..=l).rev() {
            honest += self.ctx.from_rational(&self.model.e0_unchecked(t));
            let spare = l - t;
            let mut ok = true;
            for (i, &m) in counts.iter().enumerate() {
                if m > spare {
                    continue;
                }
                let p = match survival[i].take() {
                    None => self
                        .ctx
                        .ratio(&1u8.into(), &binom((l - 1) as i64, m as i64)),
                    Some(prev) => prev * self.ctx.from_u64(spare) / self.ctx.from_u64(spare - m),
                };
                totals[i] += &p * self.ctx.from_rational(&self.model.em_unchecked(t, m));
                survival[i] = Some(p);
                if totals[i] > honest {
                    ok = false;
                }
            }
            out.push(ok);
        }
        out.reverse();
        Ok(out)
    }
}
