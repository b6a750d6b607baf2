use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use dashu_int::ops::Gcd;
use dashu_int::{IBig, UBig};
use dashu_ratio::RBig;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Arbitrary-precision rational in canonical form: positive denominator and
/// coprime numerator/denominator after every operation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ExactRational(RBig);

impl ExactRational {
    /// Panics if `den` is zero.
    pub fn new(num: impl Into<IBig>, den: impl Into<UBig>) -> Self {
        let den = den.into();
        assert!(!den.is_zero(), "rational with zero denominator");
        Self(RBig::from_parts(num.into(), den))
    }

    pub fn from_integer(n: impl Into<IBig>) -> Self {
        Self(RBig::from(n.into()))
    }

    pub fn zero() -> Self {
        Self(RBig::ZERO)
    }

    pub fn one() -> Self {
        Self(RBig::ONE)
    }

    /// `1 / n`; panics on zero.
    pub fn reciprocal(n: u64) -> Self {
        Self::new(1u8, n)
    }

    pub fn numerator(&self) -> &IBig {
        self.0.numerator()
    }

    pub fn denominator(&self) -> &UBig {
        self.0.denominator()
    }

    pub fn into_parts(self) -> (IBig, UBig) {
        self.0.into_parts()
    }

    pub fn is_zero(&self) -> bool {
        self.0.numerator() == &IBig::ZERO
    }

    pub fn is_negative(&self) -> bool {
        self.0.numerator() < &IBig::ZERO
    }

    /// Nearest `f64` (round half to even).
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    /// Decimal rendering with `digits` fractional digits, truncated toward zero.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let (num, den) = (self.numerator(), self.denominator());
        let negative = num < &IBig::ZERO;
        let abs = UBig::try_from(num.clone() * if negative { -1 } else { 1 })
            .expect("absolute value is nonnegative");
        let whole = &abs / den;
        let mut rem = &abs % den;
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        out.push_str(&whole.to_string());
        if digits > 0 {
            out.push('.');
            for _ in 0..digits {
                rem *= 10u8;
                let digit = &rem / den;
                rem %= den;
                out.push_str(&digit.to_string());
            }
        }
        out
    }

    /// Sums many rationals over a single common denominator, avoiding a gcd
    /// reduction after every addition.
    pub fn sum_many<I>(items: I) -> Self
    where
        I: IntoIterator<Item = ExactRational>,
    {
        let items: Vec<(IBig, UBig)> = items.into_iter().map(|r| r.into_parts()).collect();
        let mut common = UBig::ONE;
        for (_, den) in &items {
            common = lcm_accumulate(common, den);
        }
        let mut total = IBig::ZERO;
        for (num, den) in items {
            let scale = &common / &den;
            total += num * IBig::from(scale);
        }
        Self::new(total, common)
    }

    pub fn min_max<'a>(a: &'a Self, b: &'a Self) -> (&'a Self, &'a Self) {
        match a.cmp(b) {
            Ordering::Greater => (b, a),
            _ => (a, b),
        }
    }
}

/// `lcm(acc, den)`, taking the word-sized fast path when `den` fits in a `u64`.
pub fn lcm_accumulate(acc: UBig, den: &UBig) -> UBig {
    if den == &UBig::ONE {
        return acc;
    }
    if let Ok(small) = u64::try_from(den) {
        let rem: u64 = &acc % small;
        let g = gcd_u64(rem, small);
        return acc * (small / g);
    }
    let g = (&acc).gcd(den);
    acc * (den / g)
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl fmt::Display for ExactRational {
    /// Always `p/q`, including integers (`3/1`), so the output parses uniformly.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator(), self.denominator())
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExactRational {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num = IBig::from_str(num).map_err(|e| format!("bad numerator `{num}`: {e}"))?;
        let den = UBig::from_str(den).map_err(|e| format!("bad denominator `{den}`: {e}"))?;
        if den.is_zero() {
            return Err("zero denominator".to_string());
        }
        Ok(Self::new(num, den))
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<u64> for ExactRational {
    fn from(n: u64) -> Self {
        Self::from_integer(n)
    }
}

impl From<RBig> for ExactRational {
    fn from(r: RBig) -> Self {
        Self(r)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<&'a ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl Sum for ExactRational {
    fn sum<I: Iterator<Item = ExactRational>>(iter: I) -> Self {
        ExactRational::sum_many(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let r = ExactRational::new(6, 9u8);
        assert_eq!(r.numerator(), &IBig::from(2));
        assert_eq!(r.denominator(), &UBig::from(3u8));
        assert_eq!(ExactRational::new(-4, 8u8).to_string(), "-1/2");
        assert_eq!(ExactRational::new(0, 7u8).to_string(), "0/1");
    }

    #[test]
    fn parse_and_display() {
        let r: ExactRational = "47/180".parse().unwrap();
        assert_eq!(r.to_string(), "47/180");
        let r: ExactRational = "10/4".parse().unwrap();
        assert_eq!(r.to_string(), "5/2");
        assert_eq!(
            "3".parse::<ExactRational>().unwrap(),
            ExactRational::from(3)
        );
        assert!("1/0".parse::<ExactRational>().is_err());
        assert!("x/2".parse::<ExactRational>().is_err());
    }

    #[test]
    fn sum_many_matches_pairwise() {
        let terms: Vec<_> = (1..=40u64).map(ExactRational::reciprocal).collect();
        let pairwise = terms.iter().fold(ExactRational::zero(), |acc, r| acc + r);
        assert_eq!(ExactRational::sum_many(terms), pairwise);
        assert_eq!(ExactRational::sum_many(Vec::new()), ExactRational::zero());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(
            ExactRational::new(47, 180u8).to_decimal_string(6),
            "0.261111"
        );
        assert_eq!(ExactRational::new(-1, 3u8).to_decimal_string(3), "-0.333");
        assert_eq!(ExactRational::from(2).to_decimal_string(0), "2");
    }

    #[test]
    fn serde_string_form() {
        let r = ExactRational::new(2, 3u8);
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, "\"2/3\"");
        let back: ExactRational = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn lcm_paths_agree() {
        let big = UBig::from(2u8).pow(80) * UBig::from(3u8);
        let small = lcm_accumulate(big.clone(), &UBig::from(12u8));
        assert_eq!(small, big);
        let wide = UBig::from(5u8).pow(40);
        let via_gcd = lcm_accumulate(big.clone(), &wide);
        assert_eq!(via_gcd, &big * &wide);
    }
}
