//! Nonnegative power series for the factors of a polynomial positive on `(0, R]`.
//!
//! Every series here is exact: a rational polynomial numerator over a product
//! of geometric denominators `1 − ρs`. Coefficients follow from the recurrence
//! `c_m = p_m + ρ·c_{m−1}` and values at a point from the closed form.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::{certify_positive_on, Polynomial, Positivity};
use super::roots::{factor_real, FactorizedPoly};
use crate::error::{Error, Result};
use crate::number::{format_rational, ln_bigint, ln_rational, SmoothReducer};
use crate::real::Real;

/// Simplest rational (smallest denominator, then smallest magnitude) in `[lo, hi]`.
pub fn simplest_in_interval(lo: &BigRational, hi: &BigRational) -> BigRational {
    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    if !lo.is_positive() && !hi.is_negative() {
        return BigRational::zero();
    }
    if hi.is_negative() {
        return -simplest_in_interval(&-hi, &-lo);
    }
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    let up = &fl + BigRational::one();
    if up <= *hi {
        return up;
    }
    let inner = simplest_in_interval(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

/// Closest rational with denominator at most `max_den` (continued fractions).
pub fn limit_denominator(v: &BigRational, max_den: &BigInt) -> BigRational {
    if v.is_negative() {
        return -limit_denominator(&-v, max_den);
    }
    if v.denom() <= max_den {
        return v.clone();
    }
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let (mut n, mut d) = (v.numer().clone(), v.denom().clone());
    loop {
        let a = n.div_floor(&d);
        let q2 = &q0 + &a * &q1;
        if &q2 > max_den {
            break;
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let r = &n - &a * &d;
        n = std::mem::replace(&mut d, r);
        if d.is_zero() {
            break;
        }
    }
    let k = (max_den - &q0).div_floor(&q1);
    let b1 = BigRational::new(&p0 + &k * &p1, &q0 + &k * &q1);
    let b2 = BigRational::new(p1, q1);
    if (&b2 - v).abs() <= (&b1 - v).abs() {
        b2
    } else {
        b1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    /// Toward zero on the grid `1/max_den`.
    Down,
    /// Away from zero on the grid `1/max_den`.
    Up,
    /// Best approximation with denominator `<= max_den`.
    Nearest,
}

pub fn round_rational(v: &BigRational, mode: Rounding, max_den: &BigInt) -> BigRational {
    let v = if v.is_negative() { BigRational::zero() } else { v.clone() };
    let d = BigRational::from_integer(max_den.clone());
    match mode {
        Rounding::Down => (&v * &d).floor() / d,
        Rounding::Up => (&v * &d).ceil() / d,
        Rounding::Nearest => limit_denominator(&v, max_den),
    }
}

/// Replaces numeric coefficients by nearby nonnegative rationals; negative
/// round-off is clamped to zero.
pub fn rationalize(coeffs: &[Real], mode: Rounding, max_den: &BigInt) -> Vec<BigRational> {
    coeffs
        .iter()
        .map(|c| match c.to_rational() {
            Some(v) => round_rational(&v, mode, max_den),
            None => BigRational::zero(),
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Series generators

/// `numerator(s) / Π_j (1 − ρ_j s)` with every `ρ_j > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesGenerator {
    pub numerator: Polynomial,
    pub ratios: Vec<BigRational>,
}

impl SeriesGenerator {
    pub fn one() -> Self {
        SeriesGenerator::polynomial(Polynomial::one())
    }

    pub fn polynomial(p: Polynomial) -> Self {
        SeriesGenerator { numerator: p, ratios: Vec::new() }
    }

    /// `Σ ρ^m s^m`.
    pub fn geometric(rho: BigRational) -> Self {
        SeriesGenerator { numerator: Polynomial::one(), ratios: vec![rho] }
    }

    pub fn is_polynomial(&self) -> bool {
        self.ratios.is_empty()
    }

    pub fn product(&self, other: &SeriesGenerator) -> SeriesGenerator {
        let mut ratios = self.ratios.clone();
        ratios.extend(other.ratios.iter().cloned());
        ratios.sort();
        SeriesGenerator { numerator: &self.numerator * &other.numerator, ratios }
    }

    /// `(C, D, Q)` with `c_m = C_m / (D·Q^m)` for the first `len` coefficients.
    fn scaled_coefficients(&self, len: usize) -> (Vec<BigInt>, BigInt, BigInt) {
        self.scaled_coefficients_from(self.numerator.integral(), len)
    }

    fn scaled_coefficients_from(&self, (nums, d): (Vec<BigInt>, BigInt), len: usize) -> (Vec<BigInt>, BigInt, BigInt) {
        let q = self.ratios.iter().fold(BigInt::one(), |acc, r| acc * r.denom());
        let mut c = Vec::with_capacity(len);
        let mut qk = BigInt::one();
        for k in 0..len {
            c.push(nums.get(k).map_or_else(BigInt::zero, |v| v * &qk));
            qk *= &q;
        }
        for rho in &self.ratios {
            let f = rho.numer() * (&q / rho.denom());
            for m in 1..len {
                let prev = &c[m - 1] * &f;
                c[m] += prev;
            }
        }
        (c, d, q)
    }

    pub fn product_all(gens: &[SeriesGenerator]) -> SeriesGenerator {
        let mut ratios: Vec<BigRational> = gens.iter().flat_map(|g| g.ratios.iter().cloned()).collect();
        ratios.sort();
        SeriesGenerator { numerator: Polynomial::product_of(gens.iter().map(|g| &g.numerator)), ratios }
    }

    /// The first `len` coefficients.
    pub fn coefficients(&self, len: usize) -> Vec<BigRational> {
        let (c, d, q) = self.scaled_coefficients(len);
        let reducer = SmoothReducer::new([&d, &q]);
        let mut den = d;
        c.into_iter()
            .map(|v| {
                let out = reducer.ratio(v, den.clone());
                den *= &q;
                out
            })
            .collect()
    }

    /// Closed-form value; `None` when some `ρR >= 1` (divergent).
    pub fn value_at(&self, r: &BigRational) -> Option<BigRational> {
        let mut den = BigRational::one();
        for rho in &self.ratios {
            let f = BigRational::one() - rho * r;
            if !f.is_positive() {
                return None;
            }
            den *= f;
        }
        Some(self.numerator.eval(r) / den)
    }

    pub fn describe(&self) -> String {
        let mut s = format!("({})", self.numerator);
        for rho in &self.ratios {
            s.push_str(&format!(" / (1 - {}s)", format_rational(rho)));
        }
        s
    }
}

/// A truncated nonnegative series with its exact tail.
#[derive(Clone, Debug, PartialEq)]
pub struct NonnegSeries {
    /// `a_0 … a_{M−1}`.
    pub head: Vec<BigRational>,
    /// `Σ_{m≥M} a_m`; `None` when `a(1)` diverges.
    pub tail_sum: Option<BigRational>,
    /// Truncation degree `M`.
    pub truncation: usize,
    pub radius: BigRational,
    /// `a(R)`.
    pub value_at_radius: BigRational,
    /// `Σ_{m≥M} a_m R^m`.
    pub tail_at_radius: BigRational,
}

/// Upper limit on the truncation degree.
pub const MAX_TRUNCATION: usize = 1 << 16;

impl SeriesGenerator {
    /// Smallest `M >= min_terms` with `Σ_{m≥M} a_m R^m < target`; polynomials
    /// are kept whole (`M = degree + 1`, zero tail).
    pub fn truncate(&self, r: &BigRational, target: &BigRational, min_terms: usize) -> Result<NonnegSeries> {
        let value = self
            .value_at(r)
            .ok_or_else(|| Error::FactorInfeasible(format!("series diverges at s = {}", format_rational(r))))?;
        if self.is_polynomial() {
            let m = (self.numerator.degree().map_or(1, |d| d + 1)).max(min_terms);
            let head = self.coefficients(m);
            return Ok(NonnegSeries {
                head,
                tail_sum: Some(BigRational::zero()),
                truncation: m,
                radius: r.clone(),
                value_at_radius: value,
                tail_at_radius: BigRational::zero(),
            });
        }
        // Terms c_k·R^k share the denominator D·(Q·b)^k with R = a/b, so every
        // partial sum is one integer Horner evaluation.
        let lo_terms = min_terms.max(1);
        let mut len = 16usize.max(lo_terms);
        let integral = self.numerator.integral();
        loop {
            let (c, d, q) = self.scaled_coefficients_from(integral.clone(), len);
            let base = &q * r.denom();
            let mut ak = BigInt::one();
            let terms: Vec<BigInt> = c
                .iter()
                .map(|v| {
                    let t = v * &ak;
                    ak *= r.numer();
                    t
                })
                .collect();
            let bound = &value - target;
            // Σ_{k<m} c_k R^k > value − target
            let holds = |m: usize| -> bool {
                let den = &d * num_traits::pow(base.clone(), m - 1);
                horner(&terms[..m], &base) * bound.denom() > bound.numer() * den
            };
            if holds(len) {
                // Guess the cut from f64 suffix sums of the computed terms, then
                // settle it with exact checks (each one is a long Horner pass).
                let ln_base = ln_bigint(&base);
                let ln_target = ln_rational(target) + ln_bigint(&d);
                let mut guess = lo_terms;
                let mut suffix = f64::NEG_INFINITY;
                for k in (lo_terms..len).rev() {
                    if terms[k].is_positive() {
                        let lt = ln_bigint(&terms[k]) - k as f64 * ln_base;
                        suffix = suffix.max(lt) + (1.0 + (-(suffix - lt).abs()).exp()).ln();
                    }
                    if suffix >= ln_target {
                        guess = k + 1;
                        break;
                    }
                }
                let mut lo = guess.clamp(lo_terms, len);
                let mut step = 1;
                while !holds(lo) {
                    lo = (lo + step).min(len);
                    step *= 2;
                }
                while lo > lo_terms && holds(lo - 1) {
                    lo -= 1;
                }
                let partial = BigRational::new(horner(&terms[..lo], &base), &d * num_traits::pow(base.clone(), lo - 1));
                let tail_sum = self.value_at(&BigRational::one()).map(|v1| {
                    v1 - BigRational::new(horner(&c[..lo], &q), &d * num_traits::pow(q.clone(), lo - 1))
                });
                let reducer = SmoothReducer::new([&d, &q]);
                let mut den = d.clone();
                let head = c[..lo]
                    .iter()
                    .map(|v| {
                        let out = reducer.ratio(v.clone(), den.clone());
                        den *= &q;
                        out
                    })
                    .collect::<Vec<_>>();
                return Ok(NonnegSeries {
                    truncation: lo,
                    tail_at_radius: &value - partial,
                    head,
                    tail_sum,
                    radius: r.clone(),
                    value_at_radius: value,
                });
            }
            if len >= MAX_TRUNCATION {
                return Err(Error::FactorInfeasible(format!(
                    "tail at s = {} not below {} within {MAX_TRUNCATION} terms",
                    format_rational(r),
                    format_rational(target)
                )));
            }
            len *= 2;
        }
    }
}

/// `Σ_k t_k·base^{m−1−k}` for `m = terms.len()`.
fn horner(terms: &[BigInt], base: &BigInt) -> BigInt {
    terms.iter().fold(BigInt::zero(), |acc, t| acc * base + t)
}

/// Product of the factors, truncated so that the tail at `R` is below `ε/2`.
pub fn multiply_series(factors: &[SeriesGenerator], r: &BigRational, eps: &BigRational) -> Result<NonnegSeries> {
    if !eps.is_positive() {
        return Err(Error::Domain(format!("truncation target {} must be positive", format_rational(eps))));
    }
    let prod = SeriesGenerator::product_all(factors);
    prod.truncate(r, &(eps / BigRational::from_integer(2.into())), 1)
}

// ---------------------------------------------------------------------------
// Per-factor constructions

/// `(a, b)` with `a·(1 − ξs) = b`, both nonnegative on `(0, R]`.
pub fn series_for_linear(xi: &BigRational, r: &BigRational) -> Result<(SeriesGenerator, SeriesGenerator)> {
    if !xi.is_positive() {
        let b = Polynomial::new(vec![BigRational::one(), -xi]);
        return Ok((SeriesGenerator::one(), SeriesGenerator::polynomial(b)));
    }
    if xi * r >= BigRational::one() {
        return Err(Error::FactorInfeasible(format!(
            "linear factor 1 - {}s vanishes in (0, {}]",
            format_rational(xi),
            format_rational(r)
        )));
    }
    Ok((SeriesGenerator::geometric(xi.clone()), SeriesGenerator::one()))
}

/// Largest `N` tried by [`minimal_n`].
pub const MAX_N: usize = 4096;

fn binomial_holds(n: usize, xi: &BigRational, lambda: &BigRational) -> bool {
    let mut binom = BigUint::one();
    for k in 0..n {
        binom = binom * BigUint::from(2 * n - k) / BigUint::from(k + 1);
    }
    let lhs = BigRational::from_integer(BigInt::from(binom)) * num_traits::pow(lambda.clone(), n);
    let rhs = num_traits::pow(BigRational::from_integer(4.into()) * xi * xi, n);
    lhs >= rhs
}

/// Smallest `N >= 1` with `C(2N, N)·λ^N >= (2ξ)^{2N}`.
pub fn minimal_n(xi: &BigRational, lambda: &BigRational) -> Result<usize> {
    if *lambda <= xi * xi {
        return Err(Error::FactorInfeasible(format!(
            "quadratic factor needs lambda > xi^2 (xi = {}, lambda = {})",
            format_rational(xi),
            format_rational(lambda)
        )));
    }
    // log of C(2N,N)(λ/4ξ²)^N, tracked in f64 to skip hopeless N.
    let log_ratio = if xi.is_zero() {
        f64::INFINITY
    } else {
        crate::number::ln_rational(&(lambda / (BigRational::from_integer(4.into()) * xi * xi)))
    };
    let mut log_term = 0.0f64;
    for n in 1..=MAX_N {
        log_term += ((2 * n) as f64 * (2 * n - 1) as f64 / (n as f64 * n as f64)).ln() + log_ratio;
        if log_term >= -1e-6 && binomial_holds(n, xi, lambda) {
            return Ok(n);
        }
    }
    Err(Error::FactorInfeasible(format!("no N <= {MAX_N} satisfies the binomial bound")))
}

/// Polynomial pair for `1 − 2ξs + λs²`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticSeries {
    pub n: usize,
    pub a: Polynomial,
    pub b: Polynomial,
}

/// `a = Σ_{k<2N} P^k Q^{2N−1−k}`, `b = P^{2N} − Q^{2N}` with `P = 1 + λs²`, `Q = 2ξs`;
/// for `ξ <= 0` the factor is already nonnegative and `a = 1`.
pub fn series_for_quadratic(xi: &BigRational, lambda: &BigRational) -> Result<QuadraticSeries> {
    let two = BigRational::from_integer(2.into());
    let factor = Polynomial::new(vec![BigRational::one(), -(&two * xi), lambda.clone()]);
    if *lambda <= xi * xi {
        return Err(Error::FactorInfeasible(format!(
            "quadratic factor needs lambda > xi^2 (xi = {}, lambda = {})",
            format_rational(xi),
            format_rational(lambda)
        )));
    }
    if !xi.is_positive() {
        return Ok(QuadraticSeries { n: 0, a: Polynomial::one(), b: factor });
    }
    let n = minimal_n(xi, lambda)?;
    // With ξ = p/q, λ = u/v and t = qv, write b_m = B_m/t^m and a_m = A_m/t^m:
    // B_{2j} = C(2N, j)·u^j·v^j·q^{2j}, B_{2N} −= 4^N·p^{2N}·v^{2N},
    // A_m = B_m + 2pv·A_{m−1} − uq²v·A_{m−2}.
    let (p, q) = (xi.numer(), xi.denom());
    let (u, v) = (lambda.numer(), lambda.denom());
    let t = q * v;
    let mut big_b = vec![BigInt::zero(); 4 * n + 1];
    let mut binom = BigInt::one();
    let step = u * v * q * q;
    let mut pw = BigInt::one();
    for j in 0..=2 * n {
        big_b[2 * j] = &binom * &pw;
        binom = binom * BigInt::from(2 * n - j) / BigInt::from(j + 1);
        pw *= &step;
    }
    big_b[2 * n] -= num_traits::pow(BigInt::from(4) * p * p * v * v, n);
    let c1 = BigInt::from(2) * p * v;
    let c2 = u * q * q * v;
    let len = 4 * n - 1;
    let mut big_a: Vec<BigInt> = Vec::with_capacity(len);
    for m in 0..len {
        let mut val = big_b[m].clone();
        if m >= 1 {
            val += &c1 * &big_a[m - 1];
        }
        if m >= 2 {
            val -= &c2 * &big_a[m - 2];
        }
        big_a.push(val);
    }
    // Every a_m has a denominator dividing t^{2N−1} (a = Σ_{k<2N} P^k Q^{2N−1−k}),
    // and every b_m one dividing t^{2N}; both are kept unreduced over that power.
    let over = |coeffs: Vec<BigInt>, top: usize| {
        let den = num_traits::pow(t.clone(), top);
        let out = coeffs
            .into_iter()
            .enumerate()
            .map(|(m, c)| {
                let c = if m <= top {
                    c * num_traits::pow(t.clone(), top - m)
                } else {
                    let (quo, rem) = c.div_rem(&num_traits::pow(t.clone(), m - top));
                    debug_assert!(rem.is_zero());
                    quo
                };
                BigRational::new_raw(c, den.clone())
            })
            .collect();
        Polynomial::new(out)
    };
    let a = over(big_a, 2 * n - 1);
    let b = over(big_b, 2 * n);
    Ok(QuadraticSeries { n, a, b })
}

// ---------------------------------------------------------------------------
// Lemma construction for a whole polynomial

/// Per-factor choice of `a`.
#[derive(Clone, Debug, PartialEq)]
pub enum FactorSeries {
    /// Coefficients already nonnegative.
    Trivial,
    /// `1/(1 − ρs)` with `ρ` at or above the factor's `ξ`.
    Geometric { rho: BigRational },
    /// `1/(1 − ρs)²` with `ρ² >= λ`, for nearly-real complex pairs.
    DoubleGeometric { rho: BigRational },
    /// Polynomial construction for `1 − 2ξs + λs²`, using `ξ̂ >= ξ` and `λ̂ <= λ`.
    Quadratic { xi: BigRational, lambda: BigRational, n: usize, a: Polynomial },
}

impl FactorSeries {
    pub fn generator(&self) -> SeriesGenerator {
        match self {
            FactorSeries::Trivial => SeriesGenerator::one(),
            FactorSeries::Geometric { rho } => SeriesGenerator::geometric(rho.clone()),
            FactorSeries::DoubleGeometric { rho } => {
                SeriesGenerator { numerator: Polynomial::one(), ratios: vec![rho.clone(), rho.clone()] }
            }
            FactorSeries::Quadratic { a, .. } => SeriesGenerator::polynomial(a.clone()),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            FactorSeries::Trivial => "a = 1".into(),
            FactorSeries::Geometric { rho } => format!("a = 1/(1 - {}s)", format_rational(rho)),
            FactorSeries::DoubleGeometric { rho } => format!("a = 1/(1 - {}s)^2", format_rational(rho)),
            FactorSeries::Quadratic { xi, lambda, n, .. } => {
                format!("quadratic xi = {}, lambda = {}, N = {n}", format_rational(xi), format_rational(lambda))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct LemmaSettings {
    pub tolerance: f64,
    pub precision_bits: usize,
}

impl Default for LemmaSettings {
    fn default() -> Self {
        LemmaSettings { tolerance: 1e-30, precision_bits: 256 }
    }
}

#[derive(Clone, Debug)]
pub struct LemmaConstruction {
    pub factorization: FactorizedPoly,
    pub factors: Vec<FactorSeries>,
    /// `a(s)`, with `a_0 = 1`.
    pub a: SeriesGenerator,
}

impl LemmaConstruction {
    /// `b = a·γ` up to degree `len − 1`.
    pub fn b_head(&self, gamma: &Polynomial, len: usize) -> Polynomial {
        let a = Polynomial::new(self.a.coefficients(len));
        a.mul_trunc(gamma, len)
    }

    /// Whether `b_0 … b_{len−1}` are all nonnegative, checked on integer numerators.
    pub fn b_head_nonnegative(&self, gamma: &Polynomial, len: usize) -> bool {
        let (c, _, q) = self.a.scaled_coefficients(len);
        let (g, _) = gamma.integral();
        // b_m·D·D_γ·Q^m = Σ_j C_{m−j}·G_j·Q^j
        let mut qk = BigInt::one();
        let qg: Vec<BigInt> = g
            .iter()
            .map(|v| {
                let t = v * &qk;
                qk *= &q;
                t
            })
            .collect();
        (0..len).all(|m| {
            let s = qg.iter().enumerate().take(m + 1).fold(BigInt::zero(), |acc, (j, gj)| acc + &c[m - j] * gj);
            !s.is_negative()
        })
    }
}

fn rat(r: &Real) -> BigRational {
    r.to_rational().expect("finite")
}

fn interval(lo: &Real, hi: &Real) -> BigRational {
    simplest_in_interval(&rat(lo), &rat(hi))
}

/// Rational `ρ >= sqrt(λ)` slightly above it, or `None` if `ρR >= 1`.
fn double_geometric(lambda: &BigRational, delta: &Real, r: &BigRational, bits: usize) -> Option<FactorSeries> {
    let root = Real::from_rational(lambda, bits).sqrt();
    let lo = &root + delta;
    let room = Real::from_rational(&r.recip(), bits) - &lo;
    let w = if room.is_positive() { room / Real::from_i64(8, bits) } else { delta.clone() };
    let mut rho = interval(&lo, &(&lo + &w));
    while &rho * &rho < *lambda {
        rho = &rho * BigRational::new(1_000_001.into(), 1_000_000.into());
    }
    (&rho * r < BigRational::one()).then_some(FactorSeries::DoubleGeometric { rho })
}

/// Builds `a` with `a·γ` nonnegative and `a(R)` finite, for `γ > 0` on `(0, R]`.
///
/// Irrational factor parameters are replaced by rationals on the safe side
/// (`ξ̂ >= ξ`, `λ̂ <= λ`), so each `a_f·f` stays coefficientwise nonnegative.
pub fn lemma_series(gamma: &Polynomial, r: &BigRational, settings: &LemmaSettings) -> Result<LemmaConstruction> {
    match certify_positive_on(gamma, r)? {
        Positivity::Positive => {}
        Positivity::NonPositive { lo, hi } => {
            return Err(Error::FactorInfeasible(format!(
                "polynomial is not positive on (0, {}]: sign change in [{}, {}]",
                format_rational(r),
                format_rational(&lo),
                format_rational(&hi)
            )))
        }
    }
    let bits = settings.precision_bits;
    let fact = factor_real(gamma, settings.tolerance, bits)?;
    let one = Real::one(bits);
    let inv_r = Real::from_rational(&r.recip(), bits);
    let delta_of = |v: &Real| Real::from_f64(settings.tolerance.sqrt(), bits) * (&one + v.abs());
    let mut factors = Vec::new();

    for lf in &fact.linear_factors {
        let fs = match &lf.exact {
            Some(xi) if !xi.is_positive() => FactorSeries::Trivial,
            Some(xi) => {
                series_for_linear(xi, r)?;
                FactorSeries::Geometric { rho: xi.clone() }
            }
            None => {
                let d = delta_of(&lf.xi);
                let lo = &lf.xi + &d;
                if !lo.is_positive() {
                    FactorSeries::Trivial
                } else {
                    let room = &inv_r - &lo;
                    if !room.is_positive() {
                        return Err(Error::FactorInfeasible(format!("real root 1/{} too close to (0, R]", lf.xi)));
                    }
                    let w = room / Real::from_i64(8, bits);
                    let rho = interval(&lo, &(&lo + &w));
                    series_for_linear(&rho, r)?;
                    FactorSeries::Geometric { rho }
                }
            }
        };
        factors.push(fs);
    }

    for qf in &fact.quadratic_factors {
        let fs = match &qf.exact {
            Some((xi, _)) if !xi.is_positive() => FactorSeries::Trivial,
            Some((xi, lambda)) => match series_for_quadratic(xi, lambda) {
                Ok(s) => FactorSeries::Quadratic { xi: xi.clone(), lambda: lambda.clone(), n: s.n, a: s.a },
                Err(e) => double_geometric(lambda, &delta_of(&qf.lambda), r, bits).ok_or(e)?,
            },
            None => {
                let d = delta_of(&qf.lambda.clone().max(qf.xi.abs()));
                let lo = &qf.xi + &d;
                if !lo.is_positive() {
                    FactorSeries::Trivial
                } else {
                    let gap = &qf.eta * &qf.eta;
                    let w = gap / (Real::from_i64(16, bits) * (&one + qf.xi.abs() * Real::from_i64(2, bits)));
                    let mut chosen = None;
                    if w > d {
                        let xi_hat = interval(&lo, &(&lo + &w));
                        let lam_hi = &qf.lambda - &d;
                        let lam_hat = interval(&(&lam_hi - &w), &lam_hi);
                        if lam_hat > &xi_hat * &xi_hat {
                            if let Ok(s) = series_for_quadratic(&xi_hat, &lam_hat) {
                                chosen = Some(FactorSeries::Quadratic { xi: xi_hat, lambda: lam_hat, n: s.n, a: s.a });
                            }
                        }
                    }
                    match chosen {
                        Some(c) => c,
                        None => {
                            let lam_up = rat(&(&qf.lambda + &d));
                            double_geometric(&lam_up, &d, r, bits).ok_or_else(|| {
                                Error::FactorInfeasible(format!("complex pair with xi = {} has no usable series", qf.xi))
                            })?
                        }
                    }
                }
            }
        };
        factors.push(fs);
    }

    let a = SeriesGenerator::product_all(&factors.iter().map(FactorSeries::generator).collect::<Vec<_>>());
    Ok(LemmaConstruction { factorization: fact, factors, a })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn simplest_rationals() {
        assert_eq!(simplest_in_interval(&q(3, 10), &q(4, 10)), q(1, 3));
        assert_eq!(simplest_in_interval(&q(-1, 2), &q(1, 3)), q(0, 1));
        assert_eq!(simplest_in_interval(&q(5, 2), &q(7, 2)), q(3, 1));
        assert_eq!(simplest_in_interval(&q(-4, 10), &q(-3, 10)), q(-1, 3));
        assert_eq!(simplest_in_interval(&q(7, 4), &q(7, 4)), q(7, 4));
    }

    #[test]
    fn rounding_modes() {
        let third = Real::from_rational(&q(1, 3), 128);
        let hundred = BigInt::from(100);
        assert_eq!(rationalize(&[third.clone()], Rounding::Nearest, &hundred), vec![q(1, 3)]);
        assert_eq!(rationalize(&[third.clone()], Rounding::Down, &hundred), vec![q(33, 100)]);
        assert_eq!(rationalize(&[third], Rounding::Up, &hundred), vec![q(34, 100)]);
        let tiny_negative = Real::from_f64(-1e-40, 128);
        assert_eq!(rationalize(&[tiny_negative], Rounding::Down, &hundred), vec![q(0, 1)]);
        let exact = Real::from_rational(&q(3, 8), 128);
        assert_eq!(rationalize(&[exact], Rounding::Nearest, &hundred), vec![q(3, 8)]);
        assert_eq!(limit_denominator(&q(314159, 100000), &BigInt::from(10)), q(22, 7));
    }

    #[test]
    fn linear_factor_series() {
        let (a, b) = series_for_linear(&q(1, 2), &q(1, 1)).unwrap();
        assert_eq!(a.coefficients(4), vec![q(1, 1), q(1, 2), q(1, 4), q(1, 8)]);
        assert_eq!(b, SeriesGenerator::one());
        let (a, b) = series_for_linear(&q(-1, 1), &q(1, 1)).unwrap();
        assert_eq!(a, SeriesGenerator::one());
        assert_eq!(b.numerator, Polynomial::from_i64(&[1, 1]));
        let (a, _) = series_for_linear(&q(1, 3), &q(2, 1)).unwrap();
        assert_eq!(a.value_at(&q(2, 1)), Some(q(3, 1)));
        assert!(series_for_linear(&q(1, 2), &q(2, 1)).is_err());
    }

    #[test]
    fn quadratic_factor_series() {
        let s = series_for_quadratic(&q(1, 2), &q(1, 2)).unwrap();
        assert_eq!(s.n, 1);
        assert_eq!(s.a, Polynomial::parse(&["1", "1", "1/2"]).unwrap());
        assert_eq!(s.b, Polynomial::parse(&["1", "0", "0", "0", "1/4"]).unwrap());
        let s = series_for_quadratic(&q(0, 1), &q(1, 1)).unwrap();
        assert_eq!((s.a, s.b), (Polynomial::one(), Polynomial::from_i64(&[1, 0, 1])));
        let s = series_for_quadratic(&q(1, 4), &q(1, 2)).unwrap();
        assert_eq!(s.n, 1);
        assert_eq!(s.a, Polynomial::parse(&["1", "1/2", "1/2"]).unwrap());
        assert_eq!(s.b, Polynomial::parse(&["1", "0", "3/4", "0", "1/4"]).unwrap());
        assert!(series_for_quadratic(&q(1, 1), &q(1, 1)).is_err());
    }

    #[test]
    fn minimal_n_is_minimal() {
        // ξ²/λ = 0.9 needs a larger N.
        let (xi, lambda) = (q(3, 10), q(1, 10));
        let n = minimal_n(&xi, &lambda).unwrap();
        assert!(n > 1);
        assert!(binomial_holds(n, &xi, &lambda));
        assert!(!binomial_holds(n - 1, &xi, &lambda));
        let s = series_for_quadratic(&xi, &lambda).unwrap();
        assert!(s.a.all_nonnegative() && s.b.all_nonnegative());
        let factor = Polynomial::parse(&["1", "-3/5", "1/10"]).unwrap();
        assert_eq!(&s.a * &factor, s.b);
    }

    #[test]
    fn series_products_and_truncation() {
        let p = SeriesGenerator::polynomial(Polynomial::from_i64(&[1, 2, 2]));
        let t = multiply_series(&[p], &q(2, 1), &q(1, 10)).unwrap();
        assert_eq!((t.truncation, t.tail_sum.clone()), (3, Some(q(0, 1))));

        let g = SeriesGenerator::geometric(q(1, 2));
        let lin = SeriesGenerator::polynomial(Polynomial::from_i64(&[1, 1]));
        let t = multiply_series(&[g.clone(), lin], &q(1, 1), &q(1, 10)).unwrap();
        // a_m = 3·2^{−m} for m >= 1, so the tail from M is 6·2^{−M}.
        assert_eq!(t.truncation, 7);
        assert_eq!(t.tail_at_radius, q(6, 128));
        assert_eq!(t.tail_sum, Some(q(6, 128)));

        let h = SeriesGenerator::geometric(q(1, 3));
        let prod = g.product(&h);
        let c = prod.coefficients(6);
        for (m, cm) in c.iter().enumerate() {
            let direct: BigRational = (0..=m)
                .map(|k| num_traits::pow(q(1, 2), k) * num_traits::pow(q(1, 3), m - k))
                .sum();
            assert_eq!(*cm, direct);
        }
        // Partial fractions: 3/(1 − s/2) − 2/(1 − s/3) at s = 1 is 6 − 3 = 3.
        assert_eq!(prod.value_at(&q(1, 1)), Some(q(3, 1)));
        assert!(multiply_series(&[g], &q(1, 1), &q(0, 1)).is_err());
    }

    #[test]
    fn lemma_on_worked_example() {
        let gamma = Polynomial::from_i64(&[2, -1, 1]);
        let l = lemma_series(&gamma, &q(2, 1), &LemmaSettings::default()).unwrap();
        assert!(l.a.is_polynomial());
        assert_eq!(l.a.numerator, Polynomial::parse(&["1", "1/2", "1/2"]).unwrap());
        assert_eq!(l.b_head(&gamma, 5), Polynomial::parse(&["2", "0", "3/2", "0", "1/2"]).unwrap());
    }

    #[test]
    fn lemma_with_irrational_roots() {
        // Roots near ±1/sqrt(3) and a complex pair; positive on (0, 1/2].
        let gamma = &Polynomial::from_i64(&[1, 0, -3]) * &Polynomial::from_i64(&[3, -2, 2]);
        let r = q(1, 2);
        let l = lemma_series(&gamma, &r, &LemmaSettings::default()).unwrap();
        assert!(l.a.value_at(&r).is_some());
        let b = l.b_head(&gamma, 80);
        assert!(b.all_nonnegative(), "{b}");
        assert!(Polynomial::new(l.a.coefficients(80)).all_nonnegative());
    }

    #[test]
    fn lemma_rejects_nonpositive() {
        assert!(matches!(
            lemma_series(&Polynomial::from_i64(&[1, -1]), &q(2, 1), &LemmaSettings::default()),
            Err(Error::FactorInfeasible(_))
        ));
    }
}
