//! Configurable-precision binary floating point.
//!
//! A thin value type over `astro_float::BigFloat`. Every value carries its own
//! precision; binary operations round to the larger of the two operand
//! precisions with round-half-to-even.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint, Sign as IntSign};
use num_rational::BigRational;
use num_traits::{One, Zero};

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Rounds a requested precision up to a whole number of 64-bit words.
fn words(bits: usize) -> usize {
    bits.max(64).div_ceil(64) * 64
}

#[derive(Clone)]
pub struct Real(BigFloat);

impl Real {
    pub fn zero(bits: usize) -> Self {
        Real(BigFloat::from_word(0, words(bits)))
    }

    pub fn one(bits: usize) -> Self {
        Real(BigFloat::from_word(1, words(bits)))
    }

    pub fn from_f64(v: f64, bits: usize) -> Self {
        Real(BigFloat::from_f64(v, words(bits)))
    }

    pub fn from_i64(v: i64, bits: usize) -> Self {
        Real::from_bigint(&BigInt::from(v), bits)
    }

    pub fn from_bigint(v: &BigInt, bits: usize) -> Self {
        let p = words(bits);
        if v.is_zero() {
            return Real::zero(p);
        }
        let (sign, digits) = v.to_u64_digits();
        let len_bits = v.bits() as usize;
        let n_words = digits.len();
        let shift = n_words * 64 - len_bits;
        let shifted = v.magnitude().clone() << shift;
        let mut m = shifted.to_u64_digits();
        m.resize(n_words, 0);
        let s = if sign == IntSign::Minus { Sign::Neg } else { Sign::Pos };
        let mut f = BigFloat::from_raw_parts(&m, n_words * 64, s, len_bits as i32, false);
        f.set_precision(p, RM).expect("set precision");
        Real(f)
    }

    pub fn from_rational(v: &BigRational, bits: usize) -> Self {
        let num = Real::from_bigint(v.numer(), bits + 64);
        let den = Real::from_bigint(v.denom(), bits + 64);
        let p = words(bits);
        Real(num.0.div(&den.0, p, RM))
    }

    pub fn precision(&self) -> usize {
        self.0.precision().unwrap_or(64)
    }

    pub fn with_precision(&self, bits: usize) -> Self {
        let mut f = self.0.clone();
        let _ = f.set_precision(words(bits), RM);
        Real(f)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        !self.0.is_zero() && self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        !self.0.is_zero() && self.0.is_positive()
    }

    pub fn is_finite(&self) -> bool {
        !self.0.is_nan() && !self.0.is_inf()
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn ln(&self) -> Self {
        let p = self.precision();
        Real(with_consts(|cc| self.0.ln(p, RM, cc)))
    }

    pub fn exp(&self) -> Self {
        let p = self.precision();
        // astro-float yields NaN for exp(0).
        if self.is_zero() {
            return Real::one(p);
        }
        Real(with_consts(|cc| self.0.exp(p, RM, cc)))
    }

    pub fn sqrt(&self) -> Self {
        let p = self.precision();
        if self.is_zero() {
            return Real::zero(p);
        }
        Real(self.0.sqrt(p, RM))
    }

    pub fn powi(&self, n: usize) -> Self {
        let p = self.precision();
        Real(self.0.powi(n, p, RM))
    }

    pub fn recip(&self) -> Self {
        let p = self.precision();
        Real(self.0.reciprocal(p, RM))
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Nearest `f64`; saturates to ±inf and flushes to 0 outside the `f64` range.
    pub fn to_f64(&self) -> f64 {
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.0.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        if self.0.is_zero() {
            return 0.0;
        }
        let (m, _, s, e, _) = self.0.as_raw_parts().expect("finite value");
        let top = *m.last().expect("nonempty mantissa") as f64;
        let v = ldexp(top, e - 64);
        if s == Sign::Neg {
            -v
        } else {
            v
        }
    }

    /// Exact dyadic rational value, `None` for nan and infinities.
    pub fn to_rational(&self) -> Option<BigRational> {
        if !self.is_finite() {
            return None;
        }
        if self.0.is_zero() {
            return Some(BigRational::zero());
        }
        let (m, _, s, e, _) = self.0.as_raw_parts()?;
        let mag = BigInt::from(BigUint::from_slice(
            &m.iter().flat_map(|w| [*w as u32, (*w >> 32) as u32]).collect::<Vec<_>>(),
        ));
        let shift = e as i64 - 64 * m.len() as i64;
        let mut r = BigRational::from_integer(mag);
        if shift >= 0 {
            r *= BigRational::from_integer(BigInt::one() << shift as usize);
        } else {
            r /= BigRational::from_integer(BigInt::one() << (-shift) as usize);
        }
        if s == Sign::Neg {
            r = -r;
        }
        Some(r)
    }

    /// Scientific notation with `digits` significant digits (truncated).
    pub fn to_sci_string(&self, digits: usize) -> String {
        if !self.is_finite() {
            return format!("{}", self.0);
        }
        if self.is_zero() {
            return "0".to_string();
        }
        let full = format!("{}", self.0);
        let (mant, exp) = full.split_once('e').unwrap_or((&full, "+0"));
        let (sign, mant) = mant.strip_prefix('-').map_or(("", mant), |m| ("-", m));
        let mut out = String::from(sign);
        let mut count = 0;
        for ch in mant.chars() {
            if ch == '.' {
                out.push(ch);
                continue;
            }
            if count == digits {
                break;
            }
            out.push(ch);
            count += 1;
        }
        let out = out.trim_end_matches('0').trim_end_matches('.');
        format!("{out}e{exp}")
    }
}

fn ldexp(mut v: f64, mut e: i32) -> f64 {
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
        if v.is_infinite() {
            return v;
        }
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
        if v == 0.0 {
            return v;
        }
    }
    v * 2f64.powi(e)
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci_string(24))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci_string(20))
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Some(0)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let p = self.precision().max(rhs.precision());
                Real(self.0.$inner(&rhs.0, p, RM))
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(self.0.clone().neg())
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(self.0.neg())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rational_round_trip_is_exact_for_dyadics() {
        for (n, d) in [(3, 4), (-5, 8), (1, 1), (123456789, 1 << 20)] {
            let r = Real::from_rational(&q(n, d), 128);
            assert_eq!(r.to_rational().unwrap(), q(n, d));
        }
    }

    #[test]
    fn big_integers_convert() {
        let big: BigInt = BigInt::from(3u8).pow(200);
        let r = Real::from_bigint(&big, 512);
        assert_eq!(r.to_rational().unwrap(), BigRational::from_integer(big.clone()));
        let neg = Real::from_bigint(&-big, 64);
        assert!(neg.is_negative());
    }

    #[test]
    fn transcendental_functions() {
        let third = Real::from_rational(&q(1, 3), 128);
        let back = third.ln().exp();
        assert!(((back - &third).abs().to_f64()) < 1e-36);
        assert!((Real::from_i64(2, 128).sqrt().to_f64() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(Real::from_f64(-2.5, 64).to_f64(), -2.5);
        assert_eq!(Real::zero(128).exp(), Real::one(128));
        assert!(Real::zero(128).sqrt().is_zero());
        assert_eq!(Real::from_i64(3, 128).powi(0), Real::one(128));
    }

    #[test]
    fn formatting() {
        let r = Real::from_rational(&q(2, 5), 128);
        assert!(r.to_sci_string(5).starts_with("4e-1") || r.to_sci_string(5).starts_with("4.0"));
        assert_eq!(Real::zero(64).to_sci_string(5), "0");
    }
}
