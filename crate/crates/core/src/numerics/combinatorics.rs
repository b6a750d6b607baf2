use dashu_int::{IBig, UBig};

use super::float::{Real, RealContext};
use super::rational::ExactRational;
use crate::error::{Error, Result};
use crate::MIN_NETWORK;

/// Binomial coefficient `C(a, b)`; zero whenever `a < 0`, `b < 0` or `b > a`.
///
/// Multiplicative formula: after step `i` the accumulator equals `C(a-b+i, i)`,
/// so every division is exact.
pub fn binom(a: i64, b: i64) -> UBig {
    if a < 0 || b < 0 || b > a {
        return UBig::ZERO;
    }
    let b = b.min(a - b) as u64;
    let a = a as u64;
    let mut acc = UBig::ONE;
    for i in 1..=b {
        acc *= a - b + i;
        acc /= i;
    }
    acc
}

/// `C(n, m)` for every `n` in `0..=n_max`, built with the column recurrence
/// `C(n, m) = C(n-1, m) * n / (n - m)`.
pub fn binom_column(m: u64, n_max: u64) -> Vec<UBig> {
    let mut column = Vec::with_capacity(n_max as usize + 1);
    let mut current = UBig::ZERO;
    for n in 0..=n_max {
        if n == m {
            current = UBig::ONE;
        } else if n > m {
            current = current * n / (n - m);
        }
        column.push(current.clone());
    }
    column
}

/// `H_n = 1 + 1/2 + ... + 1/n`, with `H_0 = 0`.
pub fn harmonic(n: u64) -> ExactRational {
    let mut sums = HarmonicPartialSums::new();
    let mut last = ExactRational::zero();
    for _ in 0..n {
        last = sums.next_exact();
    }
    last
}

/// Probability that `m` fake ids, drawn without replacement from the `L - 1`
/// ids other than the cheater's own, avoid the `x - 1` ids held by the other
/// agents: `C(L - x, m) / C(L - 1, m)`.
pub fn collision_survival(l: u64, x: u64, m: u64) -> Result<ExactRational> {
    if l < MIN_NETWORK {
        return Err(Error::IdSpaceTooSmall(l));
    }
    if !(MIN_NETWORK..=l).contains(&x) {
        return Err(Error::NetworkSizeOutOfRange { l, x });
    }
    if m > l - x {
        return Ok(ExactRational::zero());
    }
    let free = binom((l - x) as i64, m as i64);
    let all = binom((l - 1) as i64, m as i64);
    Ok(ExactRational::new(IBig::from(free), all))
}

/// Exact harmonic numbers `H_1, H_2, ...` kept over the denominator
/// `lcm(1..n)`, so each step costs a few linear passes instead of a gcd on
/// ever-growing operands.
#[derive(Debug, Clone)]
pub struct HarmonicPartialSums {
    n: u64,
    numerator: UBig,
    denominator: UBig,
}

impl Default for HarmonicPartialSums {
    fn default() -> Self {
        Self::new()
    }
}

impl HarmonicPartialSums {
    pub fn new() -> Self {
        Self {
            n: 0,
            numerator: UBig::ZERO,
            denominator: UBig::ONE,
        }
    }

    /// Index of the most recent term (`0` before the first advance).
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Moves to `H_{n+1}`.
    pub fn advance(&mut self) {
        let next = self.n + 1;
        let rem: u64 = &self.denominator % next;
        let g = gcd(rem, next);
        let grow = next / g;
        if grow > 1 {
            self.denominator *= grow;
            self.numerator *= grow;
        }
        self.numerator += &self.denominator / next;
        self.n = next;
    }

    /// Advances and returns the new value in canonical form.
    pub fn next_exact(&mut self) -> ExactRational {
        self.advance();
        self.to_rational()
    }

    pub fn to_rational(&self) -> ExactRational {
        ExactRational::new(IBig::from(self.numerator.clone()), self.denominator.clone())
    }

    /// Current value rounded to the context precision. Both operands are
    /// rounded before the division, so the relative error is below three
    /// units in the last place.
    pub fn to_real(&self, ctx: &RealContext) -> Real {
        ctx.ratio(&self.numerator, &self.denominator)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
