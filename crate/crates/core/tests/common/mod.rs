//! Independent oracles shared by the integration tests. Binomials come from
//! an additive Pascal triangle and utilities are summed term by term.

#![allow(dead_code)]

use dashu_int::UBig;
use sybil_threshold::ExactRational;

pub struct Pascal {
    rows: Vec<Vec<UBig>>,
}

impl Pascal {
    pub fn new(n_max: u64) -> Self {
        let mut rows: Vec<Vec<UBig>> = vec![vec![UBig::ONE]];
        for n in 1..=n_max as usize {
            let prev = &rows[n - 1];
            let mut row = vec![UBig::ONE; n + 1];
            for k in 1..n {
                row[k] = &prev[k - 1] + &prev[k];
            }
            rows.push(row);
        }
        Self { rows }
    }

    pub fn get(&self, n: u64, k: u64) -> UBig {
        if k > n {
            return UBig::ZERO;
        }
        self.rows[n as usize][k as usize].clone()
    }
}

pub fn ratio(num: UBig, den: UBig) -> ExactRational {
    ExactRational::new(num, den)
}

pub fn le_e0(x: u64) -> ExactRational {
    ExactRational::new(1u64, x)
}

pub fn le_em(x: u64, m: u64) -> ExactRational {
    ExactRational::new(1 + m, x + m)
}

pub fn ks_em(k: u64) -> impl Fn(u64, u64) -> ExactRational {
    move |x, m| {
        if m > 0 && x <= m {
            ExactRational::one()
        } else {
            ExactRational::new(1u64, k)
        }
    }
}

/// `f(L, t)` by direct summation.
pub fn oracle_f(l: u64, t: u64, e0: impl Fn(u64) -> ExactRational) -> ExactRational {
    let mut total = ExactRational::zero();
    for x in t..=l {
        total = total + e0(x);
    }
    total / ExactRational::from(l - t + 1)
}

/// `g(L, t, m)` by direct summation with Pascal binomials.
pub fn oracle_g(
    pascal: &Pascal,
    l: u64,
    t: u64,
    m: u64,
    em: impl Fn(u64, u64) -> ExactRational,
) -> ExactRational {
    let mut total = ExactRational::zero();
    if m + t <= l {
        for x in t..=l - m {
            let survive = ratio(pascal.get(l - x, m), pascal.get(l - 1, m));
            total = total + survive * em(x, m);
        }
    }
    total / ExactRational::from(l - t + 1)
}

/// Unnormalised `g` for every `t` in `[3, L]` at a fixed `m`, via suffix
/// sums; index `t - 3`.
pub fn oracle_g_sums(
    pascal: &Pascal,
    l: u64,
    m: u64,
    em: impl Fn(u64, u64) -> ExactRational,
) -> Vec<ExactRational> {
    let mut out = vec![ExactRational::zero(); (l - 2) as usize];
    let mut acc = ExactRational::zero();
    for t in (3..=l).rev() {
        if t + m <= l {
            acc = acc + ratio(pascal.get(l - t, m), pascal.get(l - 1, m)) * em(t, m);
        }
        out[(t - 3) as usize] = acc.clone();
    }
    out
}
