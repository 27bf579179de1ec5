//! Catalysts for sequences whose elements are integer powers of a common base.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::pipeline::SynthesisSettings;
use super::verify::verify_catalyst_with_cap;
use crate::error::{Error, Result};
use crate::number::{format_rational, pow_rational};
use crate::polyseries::{
    certify_positive_on, divide_by_one_minus_s, lemma_series, LemmaConstruction, LemmaSettings, NonnegSeries,
    Polynomial, Positivity,
};
use crate::sequences::{Catalyst, SchmidtVector};

/// `y_i = K·ω^{α_i}`, `x_i = K·ω^{β_i}` with `min α = 0` and every `β_i >= 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseAInstance {
    pub omega: BigRational,
    pub k: BigRational,
    pub alpha: Vec<u64>,
    pub beta: Vec<u64>,
}

impl CaseAInstance {
    pub fn new(omega: BigRational, k: BigRational, alpha: Vec<u64>, beta: Vec<u64>) -> Result<Self> {
        if omega <= BigRational::one() {
            return Err(Error::Domain(format!("base {} must exceed 1", format_rational(&omega))));
        }
        if !k.is_positive() {
            return Err(Error::Domain("scale K must be positive".into()));
        }
        if alpha.is_empty() || alpha.len() != beta.len() {
            return Err(Error::Shape { left: alpha.len(), right: beta.len() });
        }
        if alpha.iter().min() != Some(&0) {
            return Err(Error::Precondition("exponents of y must start at 0".into()));
        }
        if beta.iter().any(|&b| b == 0 || alpha.contains(&b)) {
            return Err(Error::Precondition("x exponents must be positive and differ from every y exponent".into()));
        }
        Ok(CaseAInstance { omega, k, alpha, beta })
    }

    fn powers(&self, e: &[u64]) -> SchmidtVector {
        SchmidtVector::from_raw(e.iter().map(|&a| &self.k * pow_rational(&self.omega, a as i64)).collect())
    }

    pub fn x(&self) -> SchmidtVector {
        self.powers(&self.beta)
    }

    pub fn y(&self) -> SchmidtVector {
        self.powers(&self.alpha)
    }

    /// `Γ(s) = Σ (s^{α_i} − s^{β_i})`.
    pub fn big_gamma(&self) -> Polynomial {
        Polynomial::from_exponents(&self.alpha, &self.beta)
    }
}

/// Everything produced while building a Case A catalyst.
#[derive(Clone, Debug)]
pub struct CaseAOutcome {
    pub instance: CaseAInstance,
    pub big_gamma: Polynomial,
    pub small_gamma: Polynomial,
    pub lemma: LemmaConstruction,
    pub series: NonnegSeries,
    /// `b_0 = a_0·γ(0)`.
    pub b0: BigRational,
    /// `(ω − 1)·b_0 / Σ|Γ_k|ω^k`.
    pub epsilon: BigRational,
    /// `b = a·γ` has nonnegative coefficients below the truncation degree.
    pub b_nonnegative: bool,
    /// Catalyst weights `w_0 … w_M` actually used (head then tail).
    pub weights: Vec<BigRational>,
    /// Grid denominator when the weights were rounded.
    pub rounding_denominator: Option<BigInt>,
    /// `𝒩`: every `𝒩·w_m` is an integer.
    pub multiplicity_scale: BigUint,
    pub catalyst: Catalyst,
    pub delta_nonnegative: bool,
    pub verified: bool,
    pub attempts: usize,
    pub lemma_bits: usize,
    pub log: Vec<String>,
}

fn abs_weighted_sum(gamma: &Polynomial, omega: &BigRational) -> BigRational {
    let mut pow = BigRational::one();
    let mut acc = BigRational::zero();
    for c in gamma.coeffs() {
        acc += c.abs() * &pow;
        pow *= omega;
    }
    acc
}

/// Integer multiplicities for the weights and the scale `𝒩` they were multiplied by.
///
/// Exact weights are used when their common denominator is at most `grid`;
/// otherwise every weight is rounded to the nearest multiple of `1/grid`
/// (`w_0 = 1` stays exact).
fn integer_weights(weights: &[BigRational], grid: &BigInt, allow_rounding: bool) -> (Vec<BigUint>, BigUint, Option<BigInt>) {
    let mut exact = Some(BigInt::one());
    for w in weights {
        if let Some(l) = &exact {
            let next = if l.is_multiple_of(w.denom()) { l.clone() } else { l.lcm(w.denom()) };
            exact = (!allow_rounding || next <= *grid).then_some(next);
        }
    }
    let (scale, rounded) = match exact {
        Some(l) => (l, None),
        None => (grid.clone(), Some(grid.clone())),
    };
    let two = BigInt::from(2);
    let ints: Vec<BigInt> = weights
        .iter()
        .map(|w| (&two * w.numer() * &scale + w.denom()).div_floor(&(&two * w.denom())))
        .collect();
    // Reducing modulo the running gcd first keeps each step cheap once it is small.
    let g = ints.iter().fold(BigInt::zero(), |acc, v| if acc.is_zero() { v.clone() } else { acc.gcd(&(v % &acc)) });
    let g = if g.is_zero() { BigInt::one() } else { g };
    let to_u = |v: BigInt| v.to_biguint().expect("nonnegative weight");
    (ints.into_iter().map(|v| to_u(v / &g)).collect(), to_u(scale / &g), rounded)
}

/// `δ(ω^j) >= 0` at every breakpoint, with `δ(t) = Σ_j d_j (t − ω^j)^+` and `d = w ⋆ Γ`.
pub fn delta_breakpoints_nonnegative(weights: &[BigRational], gamma: &Polynomial, omega: &BigRational) -> bool {
    if gamma.is_zero() || weights.is_empty() {
        return true;
    }
    // Positive common factors do not change any sign.
    let (w, _) = Polynomial::new(weights.to_vec()).integral();
    let (g, _) = gamma.integral();
    let mut d = vec![BigInt::zero(); w.len() + g.len() - 1];
    for (m, wm) in w.iter().enumerate() {
        if wm.is_zero() {
            continue;
        }
        for (gk, dk) in g.iter().zip(d[m..].iter_mut()) {
            *dk += wm * gk;
        }
    }
    // With ω = a/b: b^j·δ(ω^j) = a^j·S_j − U_j, S_j = Σ_{m<j} d_m, U_j = Σ_{m<j} d_m a^m b^{j−m}.
    let (a, b) = (omega.numer(), omega.denom());
    let (mut s, mut u, mut aj) = (BigInt::zero(), BigInt::zero(), BigInt::one());
    for dj in &d {
        if &aj * &s < u {
            return false;
        }
        s += dj;
        u = (u + dj * &aj) * b;
        aj *= a;
    }
    aj * s >= u
}

/// Runs the construction with the retry ladder.
pub fn run_case_a(inst: &CaseAInstance, settings: &SynthesisSettings) -> Result<CaseAOutcome> {
    let big_gamma = inst.big_gamma();
    let small_gamma = divide_by_one_minus_s(&big_gamma)?;
    let omega = &inst.omega;
    let b0 = small_gamma.coeff(0);
    if !b0.is_positive() {
        return Err(Error::Precondition("gamma(0) must be positive".into()));
    }
    if let Positivity::NonPositive { lo, hi } = certify_positive_on(&small_gamma, omega)? {
        return Err(Error::ConditionsViolated(format!(
            "gamma is not positive on (0, {}]: sign change in [{}, {}]",
            format_rational(omega),
            format_rational(&lo),
            format_rational(&hi)
        )));
    }
    let weighted = abs_weighted_sum(&big_gamma, omega);
    let one = BigRational::one();
    let epsilon = (omega - &one) * &b0 / &weighted;
    let x = inst.x();
    let y = inst.y();
    let deg_gamma = big_gamma.degree().unwrap_or(0);

    let mut log = Vec::new();
    let mut min_terms = 1usize;
    let mut last_err = String::new();
    for attempt in 0..=settings.max_retries {
        let bits = (settings.lemma_bits << attempt.min(2)).max(64);
        let lemma_settings = LemmaSettings { tolerance: settings.lemma_tolerance, precision_bits: bits };
        let lemma = match lemma_series(&small_gamma, omega, &lemma_settings) {
            Ok(l) => l,
            Err(e @ (Error::Numeric(_) | Error::FactorInfeasible(_))) => {
                last_err = e.to_string();
                log.push(format!("attempt {}: {last_err}", attempt + 1));
                continue;
            }
            Err(e) => return Err(e),
        };
        // Tail below ε/4 leaves room for rounding the weights.
        let target = &epsilon / BigRational::from_integer(4.into());
        let series = lemma.a.truncate(omega, &target, min_terms)?;
        let m = series.truncation;
        let tail = series.tail_sum.clone().expect("a(1) converges because a(omega) does");
        let b_nonnegative = lemma.b_head_nonnegative(&small_gamma, m);

        let mut weights = series.head.clone();
        if !tail.is_zero() {
            weights.push(tail);
        }
        let bound = BigRational::from_integer(4.into())
            * BigRational::from_integer((weights.len() as u64).into())
            * pow_rational(omega, (weights.len() + deg_gamma) as i64)
            * &weighted
            / ((omega - &one) * &b0);
        let grid = BigInt::one() << (bound.ceil().to_integer().bits() as usize);
        let (ints, scale, rounded) = integer_weights(&weights, &grid, attempt == 0);
        let used: Vec<BigRational> = ints
            .iter()
            .map(|v| BigRational::new(BigInt::from(v.clone()), BigInt::from(scale.clone())))
            .collect();
        // ω is in lowest terms, so each power p^k/q^k is too.
        let (mut pk, mut qk) = (BigInt::one(), BigInt::one());
        let mut entries: Vec<(BigRational, BigUint)> = Vec::new();
        for v in &ints {
            if !v.is_zero() {
                entries.push((BigRational::new_raw(pk.clone(), qk.clone()), v.clone()));
            }
            pk *= omega.numer();
            qk *= omega.denom();
        }
        let catalyst = Catalyst::new(entries)?;
        let delta_nonnegative = delta_breakpoints_nonnegative(&used, &big_gamma, omega);
        let verified = verify_catalyst_with_cap(&x, &y, &catalyst, settings.max_product_size)?;
        log.push(format!(
            "attempt {}: {bits} bits, M = {m}, {} weights, verified = {verified}",
            attempt + 1,
            if rounded.is_some() { "rounded" } else { "exact" }
        ));
        if verified {
            return Ok(CaseAOutcome {
                instance: inst.clone(),
                big_gamma,
                small_gamma,
                lemma,
                series,
                b0,
                epsilon,
                b_nonnegative,
                weights: used,
                rounding_denominator: rounded,
                multiplicity_scale: scale,
                catalyst,
                delta_nonnegative,
                verified,
                attempts: attempt + 1,
                lemma_bits: bits,
                log,
            });
        }
        last_err = "catalyst failed exact verification".into();
        min_terms = 2 * m;
    }
    Err(Error::SynthesisFailed { attempts: settings.max_retries + 1, reason: format!("{last_err}; {}", log.join("; ")) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn worked_instance() {
        let inst = CaseAInstance::new(q(2, 1), q(1, 1), vec![0, 0, 2, 2], vec![1, 1, 1, 3]).unwrap();
        assert_eq!(inst.x(), SchmidtVector::from_integers(&[2, 2, 2, 8]).unwrap());
        let out = run_case_a(&inst, &SynthesisSettings::default()).unwrap();
        assert_eq!(out.big_gamma, Polynomial::from_i64(&[2, -3, 2, -1]));
        assert_eq!(out.small_gamma, Polynomial::from_i64(&[2, -1, 1]));
        assert_eq!(out.series.head, vec![q(1, 1), q(1, 2), q(1, 2)]);
        assert_eq!(out.series.tail_sum, Some(q(0, 1)));
        assert_eq!(out.multiplicity_scale, BigUint::from(2u8));
        assert_eq!(out.catalyst.expand().unwrap(), SchmidtVector::from_integers(&[1, 1, 2, 4]).unwrap());
        assert!(out.verified && out.delta_nonnegative && out.b_nonnegative);
        assert_eq!(out.epsilon, q(2, 2 + 6 + 8 + 8));
    }

    #[test]
    fn single_element() {
        let inst = CaseAInstance::new(q(2, 1), q(1, 1), vec![0], vec![1]).unwrap();
        let out = run_case_a(&inst, &SynthesisSettings::default()).unwrap();
        assert_eq!(out.big_gamma, Polynomial::from_i64(&[1, -1]));
        assert_eq!(out.small_gamma, Polynomial::one());
        assert_eq!(out.catalyst, Catalyst::trivial());
    }

    #[test]
    fn genuine_catalysis_instance() {
        let inst = CaseAInstance::new(q(2, 1), q(2, 1), vec![0, 2, 2, 2, 2], vec![1, 1, 1, 3, 3]).unwrap();
        let out = run_case_a(&inst, &SynthesisSettings::default()).unwrap();
        assert!(out.verified && out.delta_nonnegative);
        assert!(out.catalyst.dimension() > BigUint::one());
    }

    #[test]
    fn invalid_instances() {
        assert!(CaseAInstance::new(q(1, 1), q(1, 1), vec![0], vec![1]).is_err());
        assert!(CaseAInstance::new(q(2, 1), q(1, 1), vec![0, 1], vec![1, 2]).is_err());
        assert!(CaseAInstance::new(q(2, 1), q(1, 1), vec![1], vec![2]).is_err());
        // Σ(2^β) < Σ(2^α): γ(ω) < 0.
        let inst = CaseAInstance::new(q(2, 1), q(1, 1), vec![0, 4], vec![1, 2]).unwrap();
        assert!(matches!(run_case_a(&inst, &SynthesisSettings::default()), Err(Error::ConditionsViolated(_))));
    }

    #[test]
    fn delta_check_matches_direct_verification() {
        let gamma = Polynomial::from_i64(&[2, -3, 2, -1]);
        let omega = q(2, 1);
        assert!(delta_breakpoints_nonnegative(&[q(1, 1), q(1, 2), q(1, 2)], &gamma, &omega));
        assert!(!delta_breakpoints_nonnegative(&[q(1, 1)], &Polynomial::from_i64(&[1, -2, 2, -1, 0, 0]), &omega));
    }
}
