//! Arbitrary precision rationals in lowest terms.
//!
//! `Rat` wraps [`BigRational`], which already reduces on construction, so
//! structural equality and hashing agree with numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        Rat(BigRational::new(num.into(), den.into()))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Rat {
        assert!(!den.is_zero(), "zero denominator");
        Rat(BigRational::new(num, den))
    }

    pub fn int(n: i64) -> Rat {
        Rat(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// Always positive.
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn signum(&self) -> i32 {
        match self.0.cmp(&BigRational::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn recip(&self) -> Rat {
        Rat(self.0.recip())
    }

    /// The value as an `i64`, if it is an integer that fits.
    pub fn to_i64(&self) -> Option<i64> {
        if self.0.is_integer() {
            self.0.numer().to_i64()
        } else {
            None
        }
    }

    pub fn min(self, other: Rat) -> Rat {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Rat) -> Rat {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Decimal expansion rounded half away from zero to at most `digits`
    /// fractional digits, trailing zeros trimmed.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scale = BigInt::from(10u32).pow(digits);
        let num = self.0.numer() * &scale;
        let den = self.0.denom();
        let (q, r) = num.abs().div_rem(den);
        let rounded = if r * 2u32 >= *den { q + 1u32 } else { q };
        let negative = self.0.is_negative() && !rounded.is_zero();
        let (int_part, frac_part) = rounded.div_rem(&scale);
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        out.push_str(&int_part.to_string());
        if !frac_part.is_zero() {
            let mut frac = format!(
                "{:0>width$}",
                frac_part.to_string(),
                width = digits as usize
            );
            while frac.ends_with('0') {
                frac.pop();
            }
            out.push('.');
            out.push_str(&frac);
        }
        out
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::int(n)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational {text:?}: {reason}")]
pub struct ParseRatError {
    pub text: String,
    pub reason: &'static str,
}

fn parse_digits(s: &str, text: &str) -> Result<BigInt, ParseRatError> {
    let err = |reason| ParseRatError {
        text: text.to_string(),
        reason,
    };
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err("expected decimal digits"));
    }
    if s.len() > 1 && s.starts_with('0') {
        return Err(err("leading zero"));
    }
    s.parse().map_err(|_| err("expected decimal digits"))
}

/// Accepts only the canonical spelling `n` or `p/q` with `q > 1` and
/// `gcd(p, q) = 1`; `2/4`, `3/1`, `1/-2`, `-0` and `+1` are rejected.
impl FromStr for Rat {
    type Err = ParseRatError;

    fn from_str(text: &str) -> Result<Rat, ParseRatError> {
        let err = |reason| ParseRatError {
            text: text.to_string(),
            reason,
        };
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        let (num, den) = match body.split_once('/') {
            Some((p, q)) => (parse_digits(p, text)?, Some(parse_digits(q, text)?)),
            None => (parse_digits(body, text)?, None),
        };
        if negative && num.is_zero() {
            return Err(err("negative zero"));
        }
        let num = if negative { -num } else { num };
        match den {
            None => Ok(Rat(BigRational::from_integer(num))),
            Some(den) => {
                if den.is_zero() {
                    return Err(err("zero denominator"));
                }
                if den.is_one() {
                    return Err(err("integer written with denominator 1"));
                }
                if !num.gcd(&den).is_one() {
                    return Err(err("not in lowest terms"));
                }
                Ok(Rat(BigRational::new_raw(num, den)))
            }
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }
        impl $tr<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat(self.0.$method(&rhs.0))
            }
        }
        impl $tr<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((&self.0).$method(rhs.0))
            }
        }
        impl $tr<i64> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: i64) -> Rat {
                Rat((&self.0).$method(BigRational::from_integer(rhs.into())))
            }
        }
        impl $tr<i64> for Rat {
            type Output = Rat;
            fn $method(self, rhs: i64) -> Rat {
                Rat(self.0.$method(BigRational::from_integer(rhs.into())))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl std::iter::Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}
