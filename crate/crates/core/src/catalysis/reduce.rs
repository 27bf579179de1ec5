//! Reductions from general sequences to the power-of-ω form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::case_a::CaseAInstance;
use super::pipeline::SynthesisSettings;
use crate::conversion::{check_supertrumping_conditions, ConditionsVerdict};
use crate::error::{Error, Result};
use crate::number::{format_rational, ln_rational, pow_rational, rational_from_f64, rational_to_f64};
use crate::polyseries::simplest_in_interval;
use crate::sequences::SchmidtVector;

/// `x̄_i = ω^{β_i} <= x_i < ω·x̄_i` and `ȳ_i/ω < y_i <= ȳ_i = ω^{α_i}`.
#[derive(Clone, Debug)]
pub struct CaseBReduction {
    /// `min_ν A_ν(x)/A_ν(y)` as computed.
    pub theta: f64,
    /// Rational lower bound used for the base.
    pub theta_low: BigRational,
    pub omega: BigRational,
    pub x_bar: SchmidtVector,
    pub y_bar: SchmidtVector,
    /// `None` when every exponent cancels, i.e. `x̄↑ = ȳ↑`.
    pub instance: Option<CaseAInstance>,
}

#[derive(Clone, Debug)]
pub struct CaseCReduction {
    /// Number of zeros in `y`.
    pub m: usize,
    pub j_min: f64,
    /// `y_n·(x_1/y_n)^{n/m}`.
    pub bernoulli_bound: f64,
    pub eps_zero: BigRational,
    pub y_bar: SchmidtVector,
}

/// Largest `e` with `ω^e <= v`.
fn floor_log(v: &BigRational, omega: &BigRational) -> i64 {
    let mut e = (ln_rational(v) / ln_rational(omega)).floor() as i64;
    while pow_rational(omega, e + 1) <= *v {
        e += 1;
    }
    while pow_rational(omega, e) > *v {
        e -= 1;
    }
    e
}

/// Smallest `e` with `ω^e >= v`.
fn ceil_log(v: &BigRational, omega: &BigRational) -> i64 {
    let mut e = (ln_rational(v) / ln_rational(omega)).ceil() as i64;
    while pow_rational(omega, e - 1) >= *v {
        e -= 1;
    }
    while pow_rational(omega, e) < *v {
        e += 1;
    }
    e
}

/// Largest simple base with `ω³ <= θ_low`: an integer when `θ_low >= 8`,
/// otherwise `(k+1)/k`.
fn choose_omega(theta_low: &BigRational) -> BigRational {
    let cube = |w: &BigRational| w * w * w;
    if *theta_low >= BigRational::from_integer(8.into()) {
        let mut w = theta_low.floor().to_integer().cbrt();
        while cube(&BigRational::from_integer(&w + 1)) <= *theta_low {
            w += 1;
        }
        return BigRational::from_integer(w);
    }
    let t = rational_to_f64(theta_low);
    let mut k = ((1.0 / (t.cbrt() - 1.0)).floor() as i64).max(1);
    let base = |k: i64| BigRational::new((k + 1).into(), k.into());
    while cube(&base(k)) > *theta_low {
        k += 1;
    }
    while k > 1 && cube(&base(k - 1)) <= *theta_low {
        k -= 1;
    }
    base(k)
}

/// Removes exponents shared by both lists, one occurrence at a time.
fn strip_exponents(a: &[i64], b: &[i64]) -> (Vec<i64>, Vec<i64>) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (Vec::new(), Vec::new());
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(p), Some(q)) if p == q => {
                i += 1;
                j += 1;
            }
            (Some(p), Some(q)) if p < q => {
                ra.push(*p);
                i += 1;
            }
            (Some(p), None) => {
                ra.push(*p);
                i += 1;
            }
            (_, Some(q)) => {
                rb.push(*q);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    (ra, rb)
}

/// Normalizes exponent lists so that `min α = 0`.
fn instance_from_exponents(
    omega: &BigRational,
    alpha: &[i64],
    beta: &[i64],
    max_degree: usize,
) -> Result<Option<CaseAInstance>> {
    let (a, b) = strip_exponents(alpha, beta);
    if a.is_empty() {
        return Ok(None);
    }
    let shift = *a.iter().min().expect("nonempty");
    if b.iter().any(|&e| e <= shift) {
        return Err(Error::ConditionsViolated("smallest element of x does not exceed that of y after rounding".into()));
    }
    let top = a.iter().chain(b.iter()).max().expect("nonempty") - shift;
    if top as usize > max_degree {
        return Err(Error::SynthesisFailed {
            attempts: 0,
            reason: format!("base {} needs exponents up to {top}, above the limit {max_degree}", format_rational(omega)),
        });
    }
    let to_u = |v: &[i64]| v.iter().map(|&e| (e - shift) as u64).collect::<Vec<_>>();
    let k = pow_rational(omega, shift);
    CaseAInstance::new(omega.clone(), k, to_u(&a), to_u(&b)).map(Some)
}

/// Rounds `x` down and `y` up to powers of a rational `ω` with `ω³ <= θ`.
pub fn reduce_case_b(x: &SchmidtVector, y: &SchmidtVector, settings: &SynthesisSettings) -> Result<CaseBReduction> {
    if !x.is_strictly_positive() || !y.is_strictly_positive() {
        return Err(Error::Precondition("both sequences must be strictly positive".into()));
    }
    let report = check_supertrumping_conditions(x, y, &settings.conversion)?;
    if report.verdict != ConditionsVerdict::Holds {
        return Err(Error::ConditionsViolated(format!("power-mean conditions do not hold strictly ({:?})", report.verdict)));
    }
    let theta = report.infimum.map_or(f64::INFINITY, |r| r.to_f64()).min(1e6);
    let lo = rational_from_f64(theta * (1.0 - 2e-9)).expect("finite");
    let hi = rational_from_f64(theta * (1.0 - 1e-9)).expect("finite");
    let theta_low = simplest_in_interval(&lo, &hi);
    if theta_low <= BigRational::one() {
        return Err(Error::ConditionsViolated(format!("theta = {theta} is not certifiably above 1")));
    }
    let omega = choose_omega(&theta_low);
    let beta: Vec<i64> = x.elems().iter().map(|v| floor_log(v, &omega)).collect();
    let alpha: Vec<i64> = y.elems().iter().map(|v| ceil_log(v, &omega)).collect();
    let x_bar = SchmidtVector::from_raw(beta.iter().map(|&e| pow_rational(&omega, e)).collect());
    let y_bar = SchmidtVector::from_raw(alpha.iter().map(|&e| pow_rational(&omega, e)).collect());
    let instance = instance_from_exponents(&omega, &alpha, &beta, settings.max_degree)?;
    Ok(CaseBReduction { theta, theta_low, omega, x_bar, y_bar, instance })
}

/// Recognizes pairs whose elements are already `K·ω^e` for a rational `ω`.
///
/// Candidates for `ω` are the smallest ratio between consecutive distinct
/// values and its exact rational roots of order up to 6.
pub fn direct_case_a(x: &SchmidtVector, y: &SchmidtVector, max_degree: usize) -> Option<CaseAInstance> {
    if !x.is_strictly_positive() || !y.is_strictly_positive() {
        return None;
    }
    let k = y.min();
    if x.min() <= k {
        return None;
    }
    let mut values: Vec<BigRational> = x.elems().iter().chain(y.elems()).cloned().collect();
    values.sort();
    values.dedup();
    let step = values.windows(2).map(|w| &w[1] / &w[0]).min()?;
    let mut candidates = vec![step.clone()];
    for r in 2..=6u32 {
        let (n, d) = (step.numer().nth_root(r), step.denom().nth_root(r));
        if num_traits::pow(n.clone(), r as usize) == *step.numer() && num_traits::pow(d.clone(), r as usize) == *step.denom() {
            candidates.push(BigRational::new(n, d));
        }
    }
    let exact_log = |v: &BigRational, omega: &BigRational| -> Option<i64> {
        let e = floor_log(&(v / &k), omega);
        (pow_rational(omega, e) * &k == *v && e >= 0 && e as usize <= max_degree).then_some(e)
    };
    candidates.into_iter().find_map(|omega| {
        let alpha: Option<Vec<i64>> = y.elems().iter().map(|v| exact_log(v, &omega)).collect();
        let beta: Option<Vec<i64>> = x.elems().iter().map(|v| exact_log(v, &omega)).collect();
        let (alpha, beta) = (alpha?, beta?);
        let (a, b) = strip_exponents(&alpha, &beta);
        let shift = *a.iter().min()?;
        if b.iter().any(|&e| e <= shift) {
            return None;
        }
        let to_u = |v: &[i64]| v.iter().map(|&e| (e - shift) as u64).collect::<Vec<_>>();
        CaseAInstance::new(omega.clone(), &k * pow_rational(&omega, shift), to_u(&a), to_u(&b)).ok()
    })
}

fn ln_j(x: &[f64], y_pos: &[f64], m: f64, nu: f64) -> f64 {
    if nu.abs() < 1e-6 {
        let sx: f64 = x.iter().map(|v| v.ln()).sum();
        let sy: f64 = y_pos.iter().map(|v| v.ln()).sum();
        return (sx - sy) / m;
    }
    let s: f64 = x.iter().map(|v| v.powf(nu)).sum::<f64>() - y_pos.iter().map(|v| v.powf(nu)).sum::<f64>();
    if s <= 0.0 {
        return f64::NEG_INFINITY;
    }
    (s / m).ln() / nu
}

/// Replaces the zeros of `y` by a small rational keeping the power-mean
/// conditions strict on the whole range.
pub fn reduce_case_c(x: &SchmidtVector, y: &SchmidtVector) -> Result<CaseCReduction> {
    if x.len() != y.len() {
        return Err(Error::Shape { left: x.len(), right: y.len() });
    }
    if !x.is_strictly_positive() {
        return Err(Error::Precondition("x must have only positive elements".into()));
    }
    let n = y.len();
    let m = y.zero_count();
    if m == 0 || m == n {
        return Err(Error::Precondition(format!("y must have between 1 and {} zeros, found {m}", n - 1)));
    }
    // Logs keep very small entries representable.
    let lx: Vec<f64> = x.elems().iter().map(ln_rational).collect();
    let ly: Vec<f64> = y.elems().iter().filter(|v| v.is_positive()).map(ln_rational).collect();
    let scale = lx.iter().chain(&ly).cloned().fold(f64::NEG_INFINITY, f64::max);
    let xs: Vec<f64> = lx.iter().map(|v| (v - scale).exp()).collect();
    let ys: Vec<f64> = ly.iter().map(|v| (v - scale).exp()).collect();
    let mf = m as f64;

    let grid = 2048;
    let mut best = (0.0, ln_j(&xs, &ys, mf, 0.0));
    for i in 1..=grid {
        let nu = i as f64 / grid as f64;
        let v = ln_j(&xs, &ys, mf, nu);
        if v < best.1 {
            best = (nu, v);
        }
    }
    // Golden-section refinement around the grid minimum.
    let (mut a, mut b) = ((best.0 - 1.0 / grid as f64).max(0.0), (best.0 + 1.0 / grid as f64).min(1.0));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if ln_j(&xs, &ys, mf, c) < ln_j(&xs, &ys, mf, d) {
            b = d;
        } else {
            a = c;
        }
        best.1 = best.1.min(ln_j(&xs, &ys, mf, c)).min(ln_j(&xs, &ys, mf, d));
    }
    if !best.1.is_finite() {
        return Err(Error::ConditionsViolated("sum x^nu does not exceed sum y^nu on (0, 1]".into()));
    }
    let ln_jmin = best.1 + scale;
    let x1 = lx.iter().cloned().fold(f64::INFINITY, f64::min);
    let yn = ly.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ln_bound = yn + (n as f64 / mf) * (x1 - yn);
    // Half the bound, with slack for the floating-point evaluation.
    let ln_target = ln_jmin.min(ln_bound) + (0.5f64).ln() - 1e-6;
    if ln_target < -700.0 {
        return Err(Error::SynthesisFailed { attempts: 0, reason: "zero replacement underflows".into() });
    }
    let hi = rational_from_f64(ln_target.exp()).expect("finite");
    let lo = &hi / BigRational::from_integer(BigInt::from(2));
    let eps_zero = simplest_in_interval(&lo, &hi);
    let y_bar = SchmidtVector::from_raw(
        y.elems().iter().map(|v| if v.is_zero() { eps_zero.clone() } else { v.clone() }).collect(),
    );
    Ok(CaseCReduction {
        m,
        j_min: ln_jmin.exp(),
        bernoulli_bound: ln_bound.exp(),
        eps_zero,
        y_bar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::supermajorizes;

    fn v(items: &[&str]) -> SchmidtVector {
        SchmidtVector::parse(items).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn logs_are_exact() {
        let w = q(3, 2);
        assert_eq!(floor_log(&q(9, 4), &w), 2);
        assert_eq!(ceil_log(&q(9, 4), &w), 2);
        assert_eq!(floor_log(&q(10, 4), &w), 2);
        assert_eq!(ceil_log(&q(10, 4), &w), 3);
        assert_eq!(floor_log(&q(1, 3), &w), -3);
    }

    #[test]
    fn omega_choice() {
        assert_eq!(choose_omega(&q(30, 1)), q(3, 1));
        assert_eq!(choose_omega(&q(27, 1)), q(3, 1));
        assert_eq!(choose_omega(&q(2, 1)), q(5, 4));
        let w = choose_omega(&q(101, 100));
        assert!(&w * &w * &w <= q(101, 100));
    }

    fn check_sandwich(x: &SchmidtVector, y: &SchmidtVector, r: &CaseBReduction) {
        for (xi, xb) in x.elems().iter().zip(r.x_bar.elems()) {
            assert!(xb <= xi && *xi < &r.omega * xb);
        }
        for (yi, yb) in y.elems().iter().zip(r.y_bar.elems()) {
            assert!(yi <= yb && &(yb / &r.omega) < yi);
        }
        assert!(supermajorizes(x, &r.x_bar).unwrap());
        assert!(supermajorizes(&r.y_bar, y).unwrap());
    }

    #[test]
    fn case_b_examples() {
        let s = SynthesisSettings { max_degree: 512, ..Default::default() };
        let x = v(&["0.8", "0.2"]);
        let y = v(&["0.195", "0.195"]);
        let r = reduce_case_b(&x, &y, &s).unwrap();
        assert!(r.theta_low > BigRational::one());
        check_sandwich(&x, &y, &r);

        let x = v(&["2", "8"]);
        let y = v(&["0.5", "2"]).scaled(&q(1, 2)).unwrap();
        let r = reduce_case_b(&x, &y, &s).unwrap();
        check_sandwich(&x, &y, &r);
        let inst = r.instance.unwrap();
        assert!(inst.beta.iter().all(|&b| b >= 1));
    }

    #[test]
    fn case_b_rejects_failing_conditions() {
        let x = v(&["0.4", "0.4", "0.2"]);
        let y = v(&["0.5", "0.25", "0.25"]);
        assert!(matches!(reduce_case_b(&x, &y, &SynthesisSettings::default()), Err(Error::ConditionsViolated(_))));
    }

    #[test]
    fn direct_recognition() {
        let x = SchmidtVector::from_integers(&[4, 4, 4, 16, 16]).unwrap();
        let y = SchmidtVector::from_integers(&[2, 8, 8, 8, 8]).unwrap();
        let inst = direct_case_a(&x, &y, 64).unwrap();
        assert_eq!(inst.omega, q(2, 1));
        assert_eq!(inst.k, q(2, 1));
        assert_eq!(inst.x(), x);
        assert_eq!(inst.y(), y);
        let x = SchmidtVector::from_integers(&[3, 5]).unwrap();
        let y = SchmidtVector::from_integers(&[1, 2]).unwrap();
        assert!(direct_case_a(&x, &y, 64).is_none());
    }

    #[test]
    fn case_c_example() {
        let x = v(&["0.4", "0.4", "0.1", "0.1"]);
        let y = v(&["0.5", "0.25", "0.25", "0"]).scaled(&q(99, 100)).unwrap();
        let r = reduce_case_c(&x, &y).unwrap();
        assert_eq!(r.m, 1);
        assert!(r.j_min > 0.0);
        assert!(r.y_bar.is_strictly_positive());
        assert!(supermajorizes(&r.y_bar, &y).unwrap());
        assert!(rational_to_f64(&r.eps_zero) < r.bernoulli_bound && rational_to_f64(&r.eps_zero) < r.j_min);
        assert!(check_supertrumping_conditions(&x, &r.y_bar, &Default::default()).unwrap().holds());
    }

    #[test]
    fn case_c_shape() {
        let x = v(&["3", "3"]);
        let y = v(&["0", "2"]);
        let r = reduce_case_c(&x, &y).unwrap();
        assert_eq!(r.y_bar.elems()[1], q(2, 1));
        assert_eq!(r.y_bar.elems()[0], r.eps_zero);
        assert!(reduce_case_c(&x, &v(&["1", "2"])).is_err());
    }
}
