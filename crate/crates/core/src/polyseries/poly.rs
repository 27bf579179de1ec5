//! Exact univariate polynomials over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number::{convolve, format_rational, lcm_all, parse_rational};

/// Coefficients indexed by degree; trailing zeros are always trimmed, so the
/// zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
}

/// Name used for `Γ(s)` and `γ(s)`; integer input, rational arithmetic.
pub type IntPolynomial = Polynomial;

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Polynomial::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn parse<S: AsRef<str>>(coeffs: &[S]) -> Result<Self> {
        Ok(Polynomial::new(coeffs.iter().map(|c| parse_rational(c.as_ref())).collect::<Result<_>>()?))
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Polynomial::new(vec![c])
    }

    /// `c·s^k`.
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); k];
        coeffs.push(c);
        Polynomial::new(coeffs)
    }

    /// `Σ_i (s^{α_i} − s^{β_i})`.
    pub fn from_exponents(alpha: &[u64], beta: &[u64]) -> Self {
        let top = alpha.iter().chain(beta).copied().max().unwrap_or(0) as usize;
        let mut c = vec![BigInt::zero(); top + 1];
        for &a in alpha {
            c[a as usize] += 1;
        }
        for &b in beta {
            c[b as usize] -= 1;
        }
        Polynomial::new(c.into_iter().map(BigRational::from_integer).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    /// Multiplicity of the root at `s = 0`.
    pub fn low_order(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Drops the factor `s^k` (which must divide `self`).
    pub fn shift_down(&self, k: usize) -> Polynomial {
        Polynomial::new(self.coeffs.iter().skip(k).cloned().collect())
    }

    pub fn eval(&self, s: &BigRational) -> BigRational {
        if self.coeffs.len() <= 1 {
            return self.coeff(0);
        }
        // p(a/b)·D·b^deg as an integer Horner sum.
        let (nums, d) = self.integral();
        let (a, b) = (s.numer(), s.denom());
        let mut bk = BigInt::one();
        let mut h = BigInt::zero();
        for (k, n) in nums.iter().enumerate().rev() {
            h = h * a + n * &bk;
            if k > 0 {
                bk *= b;
            }
        }
        BigRational::new(h, d * bk)
    }

    pub fn eval_f64(&self, s: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * s + crate::number::rational_to_f64(c))
    }

    pub fn scale(&self, k: &BigRational) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn monic(&self) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.leading().recip())
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(k.into()))
                .collect(),
        )
    }

    /// Reverses the coefficient order: `s^d p(1/s)`.
    pub fn reversed(&self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().rev().cloned().collect())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.coeffs.len() - 1;
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Polynomial::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Polynomial::new(q), Polynomial::new(r))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Square-free factorization (Yun): pairs `(f_k, k)` with `p = c·Π f_k^k`,
    /// each `f_k` monic, square-free and pairwise coprime. Constant parts are omitted.
    pub fn square_free_parts(&self) -> Vec<(Polynomial, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let d = self.derivative();
        let mut a = self.gcd(&d);
        let mut b = self.div_rem(&a).0;
        let mut c = d.div_rem(&a).0;
        let mut k = 1;
        loop {
            let e = &c - &b.derivative();
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            a = b.gcd(&e);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), k));
            }
            b = b.div_rem(&a).0;
            c = e.div_rem(&a).0;
            k += 1;
        }
        out
    }

    /// Integer numerators over a common denominator.
    pub(crate) fn integral(&self) -> (Vec<BigInt>, BigInt) {
        let den = lcm_all(self.coeffs.iter().map(|c| c.denom()));
        let nums = self
            .coeffs
            .iter()
            .map(|c| if *c.denom() == den { c.numer().clone() } else { c.numer() * (&den / c.denom()) })
            .collect();
        (nums, den)
    }

    /// Product truncated to the first `len` coefficients.
    ///
    /// Works on integer numerators so that no gcd is taken inside the
    /// convolution.
    pub fn mul_trunc(&self, other: &Polynomial, len: usize) -> Polynomial {
        let len = len.min((self.coeffs.len() + other.coeffs.len()).saturating_sub(1));
        let (a, da) = self.integral();
        let (b, db) = other.integral();
        let out = convolve(&a, &b, len);
        let den = da * db;
        Polynomial::new(out.into_iter().map(|v| BigRational::new(v, den.clone())).collect())
    }

    /// Product of several polynomials, reduced once at the end.
    pub fn product_of<'a>(polys: impl IntoIterator<Item = &'a Polynomial>) -> Polynomial {
        let mut nums = vec![BigInt::one()];
        let mut den = BigInt::one();
        for p in polys {
            if p.is_zero() {
                return Polynomial::zero();
            }
                    let (pn, pd) = p.integral();
            nums = convolve(&nums, &pn, nums.len() + pn.len() - 1);
            den *= pd;
        }
        // Left unreduced over the common denominator; normalizing thousands
        // of large coefficients costs far more than the product itself.
        Polynomial::new(nums.into_iter().map(|v| BigRational::new_raw(v, den.clone())).collect())
    }

    pub fn pow(&self, k: usize) -> Polynomial {
        let mut acc = Polynomial::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn all_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| format_rational(&c.reduced())).collect()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // Products may hold unreduced coefficients.
            let mag = c.abs().reduced();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let body = match (k, mag.is_one()) {
                (0, _) => format_rational(&mag),
                (1, true) => "s".into(),
                (1, false) => format!("{}s", format_rational(&mag)),
                (_, true) => format!("s^{k}"),
                (_, false) => format!("{}s^{k}", format_rational(&mag)),
            };
            f.write_str(&body)?;
        }
        Ok(())
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        Polynomial::parse(&v).map_err(serde::de::Error::custom)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        self.mul_trunc(rhs, self.coeffs.len() + rhs.coeffs.len() - 1)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// `γ` with `(1 − s)·γ(s) = Γ(s)`.
pub fn divide_by_one_minus_s(gamma: &Polynomial) -> Result<Polynomial> {
    let at_one = gamma.eval(&BigRational::one());
    if !at_one.is_zero() {
        return Err(Error::Divisibility(format_rational(&at_one)));
    }
    // γ_m = Σ_{k ≤ m} Γ_k.
    let mut acc = BigRational::zero();
    let n = gamma.coeffs.len().saturating_sub(1);
    let out = gamma.coeffs[..n]
        .iter()
        .map(|c| {
            acc += c;
            acc.clone()
        })
        .collect();
    Ok(Polynomial::new(out))
}

// ---------------------------------------------------------------------------
// Sturm sequences

/// `p, p', −rem(p, p'), …`
pub fn sturm_sequence(p: &Polynomial) -> Vec<Polynomial> {
    let mut seq = vec![p.clone()];
    if p.is_zero() {
        return seq;
    }
    let mut prev = p.clone();
    let mut cur = p.derivative();
    while !cur.is_zero() {
        let r = prev.div_rem(&cur).1;
        seq.push(cur.clone());
        prev = cur;
        cur = -&r;
    }
    seq
}

fn count_changes(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut n = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

fn sign_of(q: &BigRational) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

/// Sign changes of the Sturm sequence at `x`.
pub fn sign_changes_at(seq: &[Polynomial], x: &BigRational) -> usize {
    count_changes(seq.iter().map(|p| sign_of(&p.eval(x))))
}

fn sign_changes_at_infinity(seq: &[Polynomial], positive: bool) -> usize {
    count_changes(seq.iter().map(|p| {
        let s = sign_of(&p.leading());
        let odd = p.degree().unwrap_or(0) % 2 == 1;
        if !positive && odd {
            -s
        } else {
            s
        }
    }))
}

/// Distinct real roots in `(a, b]`.
pub fn count_roots_in(p: &Polynomial, a: &BigRational, b: &BigRational) -> usize {
    let seq = sturm_sequence(p);
    sign_changes_at(&seq, a).saturating_sub(sign_changes_at(&seq, b))
}

/// Distinct real roots.
pub fn count_real_roots(p: &Polynomial) -> usize {
    let seq = sturm_sequence(p);
    sign_changes_at_infinity(&seq, false).saturating_sub(sign_changes_at_infinity(&seq, true))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Positivity {
    Positive,
    /// A root or sign change lies in `[lo, hi]`.
    NonPositive { lo: BigRational, hi: BigRational },
}

/// Decides `γ(s) > 0` for all `s ∈ (0, R]` exactly.
pub fn certify_positive_on(gamma: &Polynomial, r: &BigRational) -> Result<Positivity> {
    if gamma.is_zero() {
        return Err(Error::Degenerate("zero polynomial".into()));
    }
    if !r.is_positive() {
        return Err(Error::Domain(format!("radius {r} must be positive")));
    }
    // s^k is positive on (0, R], so only the cofactor matters.
    let g = gamma.shift_down(gamma.low_order());
    let seq = sturm_sequence(&g);
    let changes = |x: &BigRational| sign_changes_at(&seq, x);
    let zero = BigRational::zero();
    if changes(&zero) == changes(r) {
        // No root in (0, R]: the sign is constant there.
        return Ok(if g.eval(r).is_positive() {
            Positivity::Positive
        } else {
            Positivity::NonPositive { lo: r.clone(), hi: r.clone() }
        });
    }
    // Bisect to a short interval around the smallest root in (0, R].
    let (mut lo, mut hi) = (zero, r.clone());
    let v_lo = changes(&lo);
    let two = BigRational::from_integer(2.into());
    for _ in 0..64 {
        let mid = (&lo + &hi) / &two;
        if g.eval(&mid).is_zero() {
            return Ok(Positivity::NonPositive { lo: mid.clone(), hi: mid });
        }
        if changes(&mid) < v_lo {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Positivity::NonPositive { lo, hi })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::from_i64(c)
    }

    #[test]
    fn division_by_one_minus_s() {
        assert_eq!(divide_by_one_minus_s(&p(&[1, -1])).unwrap(), p(&[1]));
        assert_eq!(divide_by_one_minus_s(&p(&[0, 1, 0, -1])).unwrap(), p(&[0, 1, 1]));
        let g = p(&[2, -3, 2, -1]);
        let quotient = divide_by_one_minus_s(&g).unwrap();
        assert_eq!(quotient, p(&[2, -1, 1]));
        assert_eq!(&quotient * &p(&[1, -1]), g);
        assert!(matches!(divide_by_one_minus_s(&p(&[1, 1])), Err(Error::Divisibility(_))));
    }

    #[test]
    fn exponent_construction() {
        assert_eq!(Polynomial::from_exponents(&[0, 0, 2, 2], &[1, 1, 1, 3]), p(&[2, -3, 2, -1]));
    }

    #[test]
    fn positivity_certificates() {
        assert_eq!(certify_positive_on(&p(&[2, -1, 1]), &q(2, 1)).unwrap(), Positivity::Positive);
        assert_eq!(
            certify_positive_on(&p(&[1, -1]), &q(2, 1)).unwrap(),
            Positivity::NonPositive { lo: q(1, 1), hi: q(1, 1) }
        );
        assert_eq!(certify_positive_on(&p(&[1]), &q(7, 3)).unwrap(), Positivity::Positive);
        assert_eq!(certify_positive_on(&p(&[0, 1]), &q(1, 1)).unwrap(), Positivity::Positive);
        assert!(certify_positive_on(&Polynomial::zero(), &q(1, 1)).is_err());
        // Double root at 1/2 touches zero without a sign change.
        match certify_positive_on(&p(&[1, -4, 4]), &q(1, 1)).unwrap() {
            Positivity::NonPositive { lo, hi } => assert!(lo <= q(1, 2) && q(1, 2) <= hi),
            other => panic!("{other:?}"),
        }
        // Root at 3/2 lies beyond R = 1.
        assert_eq!(certify_positive_on(&p(&[3, -2]), &q(1, 1)).unwrap(), Positivity::Positive);
    }

    #[test]
    fn root_counts() {
        assert_eq!(count_real_roots(&p(&[-2, 0, 1])), 2);
        assert_eq!(count_real_roots(&p(&[1, 0, 1])), 0);
        assert_eq!(count_real_roots(&p(&[0, -1, 0, 1])), 3);
        assert_eq!(count_roots_in(&p(&[-2, 0, 1]), &q(0, 1), &q(2, 1)), 1);
    }

    #[test]
    fn square_free_decomposition() {
        // (s − 1)^2 (s + 2)
        let f = &p(&[-1, 1]).pow(2) * &p(&[2, 1]);
        let parts = f.square_free_parts();
        assert_eq!(parts, vec![(p(&[2, 1]), 1), (p(&[-1, 1]), 2)]);
        assert!(p(&[5]).square_free_parts().is_empty());
    }

    #[test]
    fn euclid() {
        let a = &p(&[-1, 1]) * &p(&[1, 1]);
        let b = &p(&[-1, 1]) * &p(&[2, 0, 1]);
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
        let (quo, rem) = b.div_rem(&p(&[-1, 1]));
        assert!(rem.is_zero());
        assert_eq!(quo, p(&[2, 0, 1]));
        assert_eq!(format!("{}", p(&[2, -1, 1])), "2 - s + s^2");
    }
}
