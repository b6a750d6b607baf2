use std::fmt;
use std::str::FromStr;

use dashu_float::round::mode::HalfEven;
use dashu_float::{Context, FBig};
use dashu_int::UBig;
use serde::{Serialize, Serializer};

use super::rational::ExactRational;
use crate::error::Error;

/// Binary floating point with a per-value precision (round half to even).
pub type Real = FBig<HalfEven>;

/// Euler–Mascheroni constant, 30 decimal digits.
const EULER_GAMMA_30: &str = "577215664901532860606512090082";

/// Numeric mode for threshold searches and bound evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Precision {
    #[default]
    Exact,
    /// Binary floating point with the given mantissa width (at least 64 bits).
    Float { bits: usize },
}

impl Precision {
    pub const MIN_FLOAT_BITS: usize = 64;

    pub fn float(bits: usize) -> Result<Self, Error> {
        if bits < Self::MIN_FLOAT_BITS {
            return Err(Error::InvalidPrecision(format!("float:{bits}")));
        }
        Ok(Self::Float { bits })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Self::Exact)
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exact => f.write_str("exact"),
            Self::Float { bits } => write!(f, "float:{bits}"),
        }
    }
}

impl FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "exact" {
            return Ok(Self::Exact);
        }
        let bits = s
            .strip_prefix("float:")
            .and_then(|b| b.parse::<usize>().ok())
            .ok_or_else(|| Error::InvalidPrecision(s.to_string()))?;
        Self::float(bits).map_err(|_| Error::InvalidPrecision(s.to_string()))
    }
}

impl Serialize for Precision {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Working precision for [`Real`] arithmetic. Every value produced through a
/// context carries exactly `bits` of mantissa, so mixed operations never
/// silently degrade to the precision of a small integer operand.
#[derive(Debug, Clone)]
pub struct RealContext {
    bits: usize,
    ctx: Context<HalfEven>,
}

impl RealContext {
    pub fn new(bits: usize) -> Self {
        Self {
            bits,
            ctx: Context::new(bits),
        }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Rough size of one unit in the last place relative to a value of
    /// magnitude one.
    pub fn epsilon(&self) -> f64 {
        2f64.powi(1 - self.bits as i32)
    }

    pub fn from_u64(&self, n: u64) -> Real {
        real_from_u64(n, self.bits)
    }

    pub fn from_ubig(&self, n: &UBig) -> Real {
        Real::from(n.clone()).with_precision(self.bits).value()
    }

    /// `num / den` with both operands rounded to the working precision first.
    pub fn ratio(&self, num: &UBig, den: &UBig) -> Real {
        let n = self.from_ubig(num);
        let d = self.from_ubig(den);
        self.ctx
            .div(n.repr(), d.repr())
            .expect("nonzero denominator")
            .value()
    }

    pub fn from_rational(&self, r: &ExactRational) -> Real {
        rational_to_real(r, self.bits)
    }

    pub fn ln(&self, n: u64) -> Real {
        ln_u64(n, self.bits)
    }

    pub fn euler_gamma(&self) -> Real {
        euler_gamma(self.bits)
    }
}

pub fn real_from_u64(n: u64, bits: usize) -> Real {
    Real::from(n).with_precision(bits).value()
}

pub fn rational_to_real(r: &ExactRational, bits: usize) -> Real {
    let ctx = Context::<HalfEven>::new(bits);
    let num = Real::from(r.numerator().clone())
        .with_precision(bits)
        .value();
    let den = Real::from(r.denominator().clone())
        .with_precision(bits)
        .value();
    ctx.div(num.repr(), den.repr())
        .expect("nonzero denominator")
        .value()
}

/// Natural logarithm of a positive integer at `bits` precision.
pub fn ln_u64(n: u64, bits: usize) -> Real {
    assert!(n > 0, "ln of zero");
    real_from_u64(n, bits).ln()
}

/// The Euler–Mascheroni constant from its stored 30-digit expansion.
pub fn euler_gamma(bits: usize) -> Real {
    let num: UBig = EULER_GAMMA_30.parse().expect("constant parses");
    let den = UBig::from(10u8).pow(EULER_GAMMA_30.len());
    RealContext::new(bits).ratio(&num, &den)
}
