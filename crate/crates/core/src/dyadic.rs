//! Exact dyadic rationals, `numerator / 2^log2_den`, over arbitrary-precision
//! integers.
//!
//! Every angle and every relative cost in this crate is one of these. Dyadic
//! rationals are closed under addition, subtraction, multiplication and
//! scaling by powers of two, and they always terminate in decimal, so cost
//! tables can be printed exactly.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{Float, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// `numerator / 2^log2_den` in canonical form: the numerator is odd, or the
/// denominator exponent is zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    log2_den: u64,
}

impl Dyadic {
    pub fn new(num: impl Into<BigInt>, log2_den: u64) -> Self {
        let mut d = Dyadic {
            num: num.into(),
            log2_den,
        };
        d.canonicalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic {
            num: BigInt::zero(),
            log2_den: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            num: BigInt::one(),
            log2_den: 0,
        }
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Dyadic::new(v, 0)
    }

    /// `2^exp` for any signed exponent.
    pub fn pow2(exp: i64) -> Self {
        if exp >= 0 {
            Dyadic {
                num: BigInt::one() << exp as u64,
                log2_den: 0,
            }
        } else {
            Dyadic {
                num: BigInt::one(),
                log2_den: exp.unsigned_abs(),
            }
        }
    }

    fn canonicalize(&mut self) {
        match self.num.trailing_zeros() {
            None => self.log2_den = 0,
            Some(tz) => {
                let shift = tz.min(self.log2_den);
                if shift > 0 {
                    self.num >>= shift;
                    self.log2_den -= shift;
                }
            }
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn log2_den(&self) -> u64 {
        self.log2_den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.log2_den == 0
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            num: self.num.abs(),
            log2_den: self.log2_den,
        }
    }

    /// Multiply by `2^exp`; exact for any sign of `exp`.
    pub fn mul_pow2(&self, exp: i64) -> Self {
        if exp >= 0 {
            let e = exp as u64;
            if e <= self.log2_den {
                Dyadic::new(self.num.clone(), self.log2_den - e)
            } else {
                Dyadic::new(&self.num << (e - self.log2_den), 0)
            }
        } else {
            Dyadic::new(self.num.clone(), self.log2_den + exp.unsigned_abs())
        }
    }

    pub fn half(&self) -> Self {
        self.mul_pow2(-1)
    }

    /// Returns `Some(e)` when the value is exactly `2^e`.
    pub fn as_power_of_two(&self) -> Option<i64> {
        if !self.num.is_positive() {
            return None;
        }
        if self.log2_den > 0 {
            // canonical with a denominator: numerator must be 1
            return self.num.is_one().then(|| -(self.log2_den as i64));
        }
        let tz = self.num.trailing_zeros()?;
        (BigInt::one() << tz == self.num).then_some(tz as i64)
    }

    /// Largest integer not above the value.
    pub fn floor(&self) -> BigInt {
        if self.log2_den == 0 {
            return self.num.clone();
        }
        // arithmetic shift on BigInt rounds toward negative infinity
        &self.num >> self.log2_den
    }

    /// Nearest `f64`. Values beyond the `f64` range saturate to infinity or
    /// flush to zero.
    pub fn to_f64(&self) -> f64 {
        if self.num.is_zero() {
            return 0.0;
        }
        let bits = self.num.bits();
        let (mantissa, extra) = if bits > 62 {
            let shift = bits - 62;
            ((&self.num >> shift).to_i64().unwrap_or(0), shift as i64)
        } else {
            (self.num.to_i64().unwrap_or(0), 0)
        };
        ldexp(mantissa as f64, extra - self.log2_den as i64)
    }

    /// Exact conversion; every finite `f64` is a dyadic rational.
    pub fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        let (mantissa, exponent, sign) = v.integer_decode();
        let num = BigInt::from(mantissa) * BigInt::from(sign);
        Some(if exponent >= 0 {
            Dyadic::new(num << exponent as u64, 0)
        } else {
            Dyadic::new(num, exponent.unsigned_abs() as u64)
        })
    }

    /// Exact decimal expansion, e.g. `3.0625`, `-0.5`, `49`.
    pub fn to_decimal_string(&self) -> String {
        if self.log2_den == 0 {
            return self.num.to_string();
        }
        let k = self.log2_den as usize;
        let scaled = self.num.magnitude() * BigUint::from(5u8).pow(self.log2_den as u32);
        let mut digits = scaled.to_string();
        if digits.len() <= k {
            digits = format!("{}{}", "0".repeat(k + 1 - digits.len()), digits);
        }
        let split = digits.len() - k;
        let sign = if self.num.is_negative() { "-" } else { "" };
        format!("{sign}{}.{}", &digits[..split], &digits[split..])
    }
}

/// `x * 2^exp` without intermediate overflow or underflow.
fn ldexp(mut x: f64, mut exp: i64) -> f64 {
    while exp > 1000 {
        x *= 2f64.powi(1000);
        exp -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while exp < -1000 {
        x *= 2f64.powi(-1000);
        exp += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(exp as i32)
}

impl FromStr for Dyadic {
    type Err = Error;

    /// Parses a terminating decimal such as `-12.375`. Decimals whose value is
    /// not dyadic (for example `0.1`) are rejected.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not a dyadic decimal: {s:?}"));
        let t = s.trim();
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part
            .chars()
            .chain(frac_part.chars())
            .all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let frac = frac_part.trim_end_matches('0');
        let digits = format!("{int_part}{frac}");
        let mut num = if digits.is_empty() {
            BigUint::zero()
        } else {
            digits.parse::<BigUint>().map_err(|_| bad())?
        };
        // num / 10^L = num / 5^L / 2^L; dyadic iff 5^L divides num
        let l = frac.len() as u32;
        let five_l = BigUint::from(5u8).pow(l);
        if !(&num % &five_l).is_zero() {
            return Err(bad());
        }
        num /= five_l;
        let sign = if neg { Sign::Minus } else { Sign::Plus };
        Ok(Dyadic::new(BigInt::from_biguint(sign, num), l as u64))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({}/2^{})", self.num, self.log2_den)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let k = self.log2_den.max(other.log2_den);
        let a = &self.num << (k - self.log2_den);
        let b = &other.num << (k - other.log2_den);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let k = self.log2_den.max(rhs.log2_den);
        let a = &self.num << (k - self.log2_den);
        let b = &rhs.num << (k - rhs.log2_den);
        Dyadic::new(a + b, k)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        &self - &rhs
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -&self.num,
            log2_den: self.log2_den,
        }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.log2_den + rhs.log2_den)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        &self * &rhs
    }
}

impl Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::zero(), |acc, x| &acc + &x)
    }
}

impl<'a> Sum<&'a Dyadic> for Dyadic {
    fn sum<I: Iterator<Item = &'a Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::zero(), |acc, x| &acc + x)
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::zero()
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_decimal_string())
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
