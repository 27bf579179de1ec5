//! Exact parsing and formatting of rationals.
//!
//! Decimal strings are read as base-10 rationals ("0.4" is exactly 2/5), never
//! through binary floating point.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_decimal(num)?;
        let d = parse_decimal(den)?;
        if d.is_zero() {
            return Err(Error::Parse(text.to_string()));
        }
        return Ok(n / d);
    }
    parse_decimal(s)
}

fn parse_decimal(text: &str) -> Result<BigRational> {
    let err = || Error::Parse(text.to_string());
    let s = text.trim();
    let (negative, s) = match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| err())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigInt::parse_bytes(digits.as_bytes(), 10).ok_or_else(err)?;
    if negative {
        value = -value;
    }
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > 100_000 {
        return Err(err());
    }
    let ten = BigInt::from(10u8);
    let factor = num_traits::pow(ten, scale.unsigned_abs() as usize);
    Ok(if scale >= 0 {
        BigRational::from_integer(value * factor)
    } else {
        BigRational::new(value, factor)
    })
}

/// `"p/q"`, or `"p"` for integers.
pub fn format_rational(q: &BigRational) -> String {
    q.to_string()
}

/// Natural log of a positive rational as `f64`, robust to huge numerators and denominators.
pub fn ln_rational(q: &BigRational) -> f64 {
    debug_assert!(q.is_positive());
    ln_bigint(q.numer()) - ln_bigint(q.denom())
}

pub fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return num_traits::ToPrimitive::to_f64(n).unwrap_or(f64::NAN).abs().ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    num_traits::ToPrimitive::to_f64(&top).unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Best-effort `f64` value of a rational, saturating instead of failing.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let v = ln_rational(&q.abs()).exp();
    let direct = num_traits::ToPrimitive::to_f64(q);
    let v = match direct {
        Some(d) if d.is_finite() && d != 0.0 => d.abs(),
        _ => v,
    };
    if q.is_negative() {
        -v
    } else {
        v
    }
}

pub fn rational_from_f64(v: f64) -> Option<BigRational> {
    BigRational::from_float(v)
}

pub(crate) fn pow_rational(base: &BigRational, exp: i64) -> BigRational {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        num_traits::pow(base.recip(), exp.unsigned_abs() as usize)
    }
}


/// Least common multiple of many denominators; skips the gcd whenever the
/// running value is already a multiple.
pub(crate) fn lcm_all<'a>(values: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, d| if acc.is_multiple_of(d) { acc } else { acc.lcm(d) })
}

/// First `len` coefficients of the product of two integer polynomials.
///
/// Nonnegative inputs of some size go through Kronecker substitution, so the
/// whole convolution becomes one big-integer multiplication.
pub(crate) fn convolve(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let (a, b) = (&a[..a.len().min(len)], &b[..b.len().min(len)]);
    if a.is_empty() || b.is_empty() {
        return vec![BigInt::zero(); len];
    }
    let nonnegative = a.iter().chain(b).all(|v| v.sign() != Sign::Minus);
    if nonnegative && a.len().min(b.len()) >= 8 {
        let bits = |v: &[BigInt]| v.iter().map(BigInt::bits).max().unwrap_or(0);
        let room = bits(a) + bits(b) + (a.len().min(b.len()) as u64).ilog2() as u64 + 2;
        let limbs = room.div_ceil(32) as usize;
        let prod = pack(a, limbs) * pack(b, limbs);
        let digits = prod.to_u32_digits();
        return (0..len)
            .map(|i| {
                let lo = (i * limbs).min(digits.len());
                let hi = ((i + 1) * limbs).min(digits.len());
                BigInt::from(BigUint::from_slice(&digits[lo..hi]))
            })
            .collect();
    }
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (y, o) in b.iter().zip(out[i..].iter_mut()) {
            *o += x * y;
        }
    }
    out
}

fn pack(v: &[BigInt], limbs: usize) -> BigUint {
    let mut digits = vec![0u32; v.len() * limbs];
    for (i, c) in v.iter().enumerate() {
        for (j, d) in c.magnitude().iter_u32_digits().enumerate() {
            digits[i * limbs + j] = d;
        }
    }
    BigUint::new(digits)
}

/// Primes below 2^16.
fn small_primes() -> &'static [u32] {
    static PRIMES: std::sync::OnceLock<Vec<u32>> = std::sync::OnceLock::new();
    PRIMES.get_or_init(|| {
        const LIMIT: usize = 1 << 16;
        let mut sieve = vec![true; LIMIT];
        let mut out = Vec::new();
        for i in 2..LIMIT {
            if sieve[i] {
                out.push(i as u32);
                for j in (i * i..LIMIT).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        out
    })
}

/// Removes every factor `p` from `n`, in word-sized chunks first.
fn strip_prime(n: &mut BigInt, p: u64) {
    let mut chunk = p;
    while let Some(next) = chunk.checked_mul(p) {
        chunk = next;
    }
    for step in [chunk, p] {
        while !n.is_zero() && (&*n % step).is_zero() {
            *n /= step;
        }
    }
}

/// Reduces fractions whose denominators are products of a known set of small
/// primes; a gcd on large operands is much slower than stripping those primes.
pub(crate) struct SmoothReducer {
    primes: Option<Vec<u64>>,
}

impl SmoothReducer {
    /// Primes of the given generators, or `None` when some generator has a
    /// prime factor of `2^16` or more.
    pub(crate) fn new<'a>(generators: impl IntoIterator<Item = &'a BigInt>) -> Self {
        let mut primes: Vec<u64> = Vec::new();
        for g in generators {
            let mut rest = g.abs();
            for &p in small_primes() {
                if rest.is_one() {
                    break;
                }
                if (&rest % p).is_zero() {
                    strip_prime(&mut rest, p as u64);
                    primes.push(p as u64);
                }
            }
            if !rest.is_one() {
                return SmoothReducer { primes: None };
            }
        }
        primes.sort_unstable();
        primes.dedup();
        SmoothReducer { primes: Some(primes) }
    }

    /// `n/d` in lowest terms, for `d > 0` built from the generators.
    pub(crate) fn ratio(&self, mut n: BigInt, mut d: BigInt) -> BigRational {
        let Some(primes) = &self.primes else { return BigRational::new(n, d) };
        if n.is_zero() {
            return BigRational::zero();
        }
        for &p in primes {
            let mut chunk = p;
            while let Some(next) = chunk.checked_mul(p) {
                chunk = next;
            }
            for step in [chunk, p] {
                while (&d % step).is_zero() && (&n % step).is_zero() {
                    d /= step;
                    n /= step;
                }
            }
        }
        BigRational::new_raw(n, d)
    }
}
