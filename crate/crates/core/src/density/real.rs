//! Binary fixed-point reals on top of BigInt: 256 fractional bits, about 77
//! decimal digits.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub const FRAC_BITS: u32 = 256;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Real(BigInt);

impl Real {
    pub fn zero() -> Self {
        Real(BigInt::zero())
    }

    pub fn one() -> Self {
        Real(BigInt::one() << FRAC_BITS)
    }

    pub fn from_int(x: impl Into<BigInt>) -> Self {
        Real(x.into() << FRAC_BITS)
    }

    /// num / den rounded to nearest.
    pub fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let scaled = num << (FRAC_BITS + 1);
        let q = scaled.div_floor(den);
        Real((q + 1) >> 1)
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Self::from_ratio(r.numer(), r.denom())
    }

    pub fn recip(&self) -> Self {
        Self::one().div(self)
    }

    pub fn div(&self, other: &Real) -> Self {
        Self::from_ratio(&self.0, &other.0)
    }

    pub fn abs(&self) -> Self {
        Real(self.0.abs())
    }

    pub fn is_negative(&self) -> bool {
        self.0.sign() == Sign::Minus
    }

    pub fn to_f64(&self) -> f64 {
        // keep 64 significant fractional bits before converting
        let shifted: BigInt = &self.0 >> (FRAC_BITS - 64);
        shifted.to_f64().unwrap_or(f64::NAN) / 2f64.powi(64)
    }

    /// Decimal expansion truncated (towards zero) to `digits` places.
    pub fn to_decimal(&self, digits: usize) -> String {
        let ten = BigInt::from(10).pow(digits as u32);
        let scaled: BigInt = (self.0.abs() * ten) >> FRAC_BITS;
        let s = scaled.to_string();
        let s = format!("{s:0>width$}", width = digits + 1);
        let (int, frac) = s.split_at(s.len() - digits);
        let sign = if self.is_negative() { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(f.precision().unwrap_or(20)))
    }
}

impl Add for &Real {
    type Output = Real;
    fn add(self, o: &Real) -> Real {
        Real(&self.0 + &o.0)
    }
}

impl Sub for &Real {
    type Output = Real;
    fn sub(self, o: &Real) -> Real {
        Real(&self.0 - &o.0)
    }
}

impl Mul for &Real {
    type Output = Real;
    fn mul(self, o: &Real) -> Real {
        let half = BigInt::one() << (FRAC_BITS - 1);
        Real(((&self.0 * &o.0) + half) >> FRAC_BITS)
    }
}

impl Mul<i64> for &Real {
    type Output = Real;
    fn mul(self, k: i64) -> Real {
        Real(&self.0 * k)
    }
}

impl Mul<&BigInt> for &Real {
    type Output = Real;
    fn mul(self, k: &BigInt) -> Real {
        Real(&self.0 * k)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-&self.0)
    }
}
