//! Exact rational arithmetic for the x-axis and signed log-domain magnitudes
//! for the y-axis.
//!
//! Everything that feeds the digit combinatorics (points, anchors, interval
//! lengths) stays rational and exact. Slopes grow geometrically and overflow
//! f64 after a few hundred generations, so they live in log space from the
//! start.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always reduced, denominator > 0.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `num/den`, reduced, with the sign carried by the numerator.
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(BigInt::from(num), BigInt::from(den))))
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Rational(self.0.recip()))
    }

    /// Nearest f64; loses precision once numerator or denominator outgrow
    /// the 53-bit mantissa, which is fine for reporting.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_unit_interval(&self) -> bool {
        !self.0.is_negative() && self.0 <= BigRational::one()
    }

    /// Exact natural log of a positive rational, as a plain f64.
    ///
    /// Computed from the bit lengths of numerator and denominator so it keeps
    /// full relative precision even when `to_f64` would underflow.
    pub fn ln(&self) -> f64 {
        assert!(self.0.is_positive(), "ln of a non-positive rational");
        ln_bigint(self.numer()) - ln_bigint(self.denom())
    }
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1023 {
        return n.to_f64().expect("positive bigint").ln();
    }
    // shift down to a representable range and add back k*ln(2)
    let shift = bits - 64;
    let head = (n >> shift).to_f64().expect("shifted bigint");
    head.ln() + shift as f64 * std::f64::consts::LN_2
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl $trait for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

/// Signed magnitude stored as a natural log: `sign * exp(ln_abs)`.
///
/// `ln_abs` is meaningless when `sign == 0`. Multiplication adds logs, so the
/// representable range is huge; conversion back to f64 saturates to infinity
/// past the float range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedLog {
    sign: i8,
    ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog { sign: 0, ln_abs: f64::NEG_INFINITY };

    pub fn new(sign: i8, ln_abs: f64) -> Self {
        assert!(sign == -1 || sign == 0 || sign == 1);
        if sign == 0 {
            SignedLog::ZERO
        } else {
            SignedLog { sign, ln_abs }
        }
    }

    pub fn from_f64(v: f64) -> Self {
        if v == 0.0 {
            SignedLog::ZERO
        } else {
            SignedLog { sign: if v > 0.0 { 1 } else { -1 }, ln_abs: v.abs().ln() }
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn ln_abs(&self) -> f64 {
        self.ln_abs
    }

    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            self.sign as f64 * self.ln_abs.exp()
        }
    }

    pub fn abs(&self) -> Self {
        SignedLog { sign: self.sign.abs(), ln_abs: self.ln_abs }
    }

    pub fn neg(&self) -> Self {
        SignedLog { sign: -self.sign, ln_abs: self.ln_abs }
    }

    pub fn mul(&self, other: &SignedLog) -> Self {
        if self.sign == 0 || other.sign == 0 {
            return SignedLog::ZERO;
        }
        SignedLog { sign: self.sign * other.sign, ln_abs: self.ln_abs + other.ln_abs }
    }

    pub fn scale(&self, c: f64) -> Self {
        if self.sign == 0 || c == 0.0 {
            return SignedLog::ZERO;
        }
        let sign = if c > 0.0 { self.sign } else { -self.sign };
        SignedLog { sign, ln_abs: self.ln_abs + c.abs().ln() }
    }

    /// `self + c * t`, carried out in log space via log1p so the relative
    /// error stays at f64 scale for any magnitudes.
    pub fn add_scaled(&self, c: f64, t: &SignedLog) -> Self {
        let rhs = t.scale(c);
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return *self;
        }
        let (big, small) = if self.ln_abs >= rhs.ln_abs { (self, &rhs) } else { (&rhs, self) };
        let d = small.ln_abs - big.ln_abs; // <= 0
        if big.sign == small.sign {
            SignedLog { sign: big.sign, ln_abs: big.ln_abs + d.exp().ln_1p() }
        } else {
            let e = d.exp();
            if e == 1.0 {
                return SignedLog::ZERO;
            }
            SignedLog { sign: big.sign, ln_abs: big.ln_abs + (-e).ln_1p() }
        }
    }

    /// Log of `sqrt(1 + m^2)` for `m = self`, robust across the whole range.
    pub fn ln_hypot1(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        if self.ln_abs > 0.0 {
            // sqrt(1+m^2) = |m| * sqrt(1 + 1/m^2)
            self.ln_abs + 0.5 * (-2.0 * self.ln_abs).exp().ln_1p()
        } else {
            0.5 * (2.0 * self.ln_abs).exp().ln_1p()
        }
    }
}
