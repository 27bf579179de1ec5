//! Conversion probabilities: power means, the single-copy formula, the
//! catalytic bound `min_ν A_ν(x)/A_ν(y)` and its attainability.
//!
//! The interior minimization scans an `f64` grid, compactified through
//! `u = tanh(ν/σ)`, and refines every local grid minimum by golden-section
//! search on a configurable-precision objective.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number::{ln_rational, rational_to_f64};
use crate::real::Real;
use crate::sequences::{f_m, partial_sums, strip_common, SchmidtVector};

/// Knobs for the catalytic-probability minimizer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConversionSettings {
    pub precision_bits: usize,
    /// Uniform points in the compactified coordinate.
    pub grid: usize,
    pub sigma: f64,
    /// Most negative finite ν on the grid; doubled on demand.
    pub nu_cap: f64,
    /// Relative tolerance for every classification decision.
    pub tolerance: f64,
    /// At most this many grid minima are refined.
    pub max_refinements: usize,
}

impl Default for ConversionSettings {
    fn default() -> Self {
        ConversionSettings {
            precision_bits: 128,
            grid: 2048,
            sigma: 32.0,
            nu_cap: -512.0,
            tolerance: 1e-12,
            max_refinements: 24,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Attainability {
    Attainable,
    NotAttainable,
    Certain,
    BoundaryUnknown,
}

impl std::fmt::Display for Attainability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Attainability::Attainable => "ATTAINABLE",
            Attainability::NotAttainable => "NOT_ATTAINABLE",
            Attainability::Certain => "CERTAIN",
            Attainability::BoundaryUnknown => "BOUNDARY_UNKNOWN",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct ConversionReport {
    pub p_vidal: BigRational,
    /// `min(p_cat_raw, 1)`.
    pub p_cat: Real,
    /// Unclamped minimum of the ratio over `[−∞, 1]`.
    pub p_cat_raw: Real,
    /// `f64::NEG_INFINITY` for the `−∞` endpoint.
    pub argmin_nu: f64,
    pub attainability: Attainability,
    pub tolerance: f64,
    pub precision_bits: usize,
    /// Ratio at `ν = −∞`; `None` stands for `+∞`.
    pub endpoint_neg_inf: Option<BigRational>,
    /// Ratio at `ν = 1`, i.e. `Σx/Σy`.
    pub endpoint_one: BigRational,
    /// Smallest refined interior local minimum `(ν, r(ν))`.
    pub interior_min: Option<(f64, Real)>,
    pub nu_cap: f64,
    pub diagnostics: Vec<String>,
}

/// Sampled ratio curve; `ratio` is `+∞` where `A_ν(y) = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerMeanCurve {
    pub samples: Vec<(f64, f64)>,
    pub nu_cap: f64,
    pub grid: usize,
    pub sigma: f64,
    pub precision_bits: usize,
}

impl PowerMeanCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("nu,ratio\n");
        for (nu, r) in &self.samples {
            out.push_str(&format!("{},{}\n", fmt_ext(*nu), fmt_ext(*r)));
        }
        out
    }
}

fn fmt_ext(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:e}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConditionsVerdict {
    Holds,
    Fails { witness_nu: f64, ratio: f64 },
    Boundary,
}

#[derive(Clone, Debug)]
pub struct ConditionsReport {
    pub verdict: ConditionsVerdict,
    /// Infimum of `A_ν(x̄)/A_ν(ȳ)` on the stripped pair; `None` means `+∞`.
    pub infimum: Option<Real>,
    pub argmin_nu: f64,
    /// The standing assumption `Σx > Σy`.
    pub sum_exceeds: bool,
}

impl ConditionsReport {
    pub fn holds(&self) -> bool {
        self.verdict == ConditionsVerdict::Holds
    }
}

// ---------------------------------------------------------------------------
// log A_ν evaluation

/// `f64` logs of a sequence plus the cumulants used near `ν = 0`.
#[derive(Clone, Debug)]
struct LogsF64 {
    n: f64,
    logs: Vec<f64>,
    zeros: usize,
    kappa: [f64; 5],
}

impl LogsF64 {
    fn new(x: &SchmidtVector) -> Self {
        let logs: Vec<f64> = x.elems().iter().filter(|v| !v.is_zero()).map(ln_rational).collect();
        let zeros = x.zero_count();
        let kappa = if zeros == 0 { cumulants_f64(&logs) } else { [0.0; 5] };
        LogsF64 { n: x.len() as f64, logs, zeros, kappa }
    }

    fn log_mean(&self, nu: f64) -> f64 {
        if nu == f64::NEG_INFINITY {
            return if self.zeros > 0 { f64::NEG_INFINITY } else { self.logs.iter().cloned().fold(f64::INFINITY, f64::min) };
        }
        if self.zeros > 0 && nu <= 0.0 {
            return f64::NEG_INFINITY;
        }
        if self.zeros == 0 && nu.abs() < 1e-3 {
            let k = &self.kappa;
            return k[0] + nu * (k[1] / 2.0 + nu * (k[2] / 6.0 + nu * (k[3] / 24.0 + nu * k[4] / 120.0)));
        }
        let m = self.logs.iter().map(|l| nu * l).fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = self.logs.iter().map(|l| (nu * l - m).exp()).sum();
        (m + s.ln() - self.n.ln()) / nu
    }
}

fn cumulants_f64(logs: &[f64]) -> [f64; 5] {
    let n = logs.len() as f64;
    let mean = logs.iter().sum::<f64>() / n;
    let mu = |k: i32| logs.iter().map(|l| (l - mean).powi(k)).sum::<f64>() / n;
    let (m2, m3, m4, m5) = (mu(2), mu(3), mu(4), mu(5));
    [mean, m2, m3, m4 - 3.0 * m2 * m2, m5 - 10.0 * m2 * m3]
}

/// High-precision counterpart of [`LogsF64`].
#[derive(Clone, Debug)]
struct LogsReal {
    bits: usize,
    ln_n: Real,
    logs: Vec<Real>,
    zeros: usize,
    kappa: Vec<Real>,
    min_log: Option<Real>,
}

impl LogsReal {
    fn new(x: &SchmidtVector, bits: usize) -> Self {
        let logs: Vec<Real> = x
            .elems()
            .iter()
            .filter(|v| !v.is_zero())
            .map(|v| Real::from_rational(v, bits).ln())
            .collect();
        let zeros = x.zero_count();
        let kappa = if zeros == 0 { cumulants_real(&logs, bits) } else { Vec::new() };
        let min_log = if zeros == 0 { logs.iter().cloned().reduce(Real::min) } else { None };
        LogsReal { bits, ln_n: Real::from_i64(x.len() as i64, bits).ln(), logs, zeros, kappa, min_log }
    }

    /// `log A_ν`; `None` is `−∞`.
    fn log_mean(&self, nu: f64) -> Option<Real> {
        if nu == f64::NEG_INFINITY {
            return self.min_log.clone();
        }
        if self.zeros > 0 && nu <= 0.0 {
            return None;
        }
        let v = Real::from_f64(nu, self.bits);
        if self.zeros == 0 && nu.abs() < 2f64.powf(-(self.bits as f64) / 5.0) {
            let k = &self.kappa;
            let mut acc = &k[4] / Real::from_i64(120, self.bits);
            for (c, d) in [(&k[3], 24), (&k[2], 6), (&k[1], 2)] {
                acc = c / Real::from_i64(d, self.bits) + &v * acc;
            }
            return Some(&k[0] + &v * acc);
        }
        let scaled: Vec<Real> = self.logs.iter().map(|l| &v * l).collect();
        let m = scaled.iter().cloned().reduce(Real::max)?;
        let s = scaled
            .iter()
            .fold(Real::zero(self.bits), |acc, t| acc + (t - &m).exp());
        Some((m + s.ln() - &self.ln_n) / v)
    }
}

fn cumulants_real(logs: &[Real], bits: usize) -> Vec<Real> {
    let n = Real::from_i64(logs.len() as i64, bits);
    let mean = logs.iter().fold(Real::zero(bits), |a, l| a + l) / &n;
    let mu = |k: usize| logs.iter().fold(Real::zero(bits), |a, l| a + (l - &mean).powi(k)) / &n;
    let (m2, m3, m4, m5) = (mu(2), mu(3), mu(4), mu(5));
    let k4 = &m4 - Real::from_i64(3, bits) * &m2 * &m2;
    let k5 = &m5 - Real::from_i64(10, bits) * &m2 * &m3;
    vec![mean, m2, m3, k4, k5]
}

fn check_nu(nu: f64) -> Result<()> {
    if nu.is_nan() || nu > 1.0 {
        return Err(Error::Domain(format!("power mean order {nu} outside [-inf, 1]")));
    }
    Ok(())
}

/// `A_ν(x)` at `bits` of precision; `ν = f64::NEG_INFINITY` gives the smallest element.
pub fn power_mean(x: &SchmidtVector, nu: f64, bits: usize) -> Result<Real> {
    check_nu(nu)?;
    if nu == f64::NEG_INFINITY {
        return Ok(Real::from_rational(&x.min(), bits));
    }
    Ok(match LogsReal::new(x, bits).log_mean(nu) {
        Some(l) => l.exp(),
        None => Real::zero(bits),
    })
}

/// `A_ν(x)` in `f64`, accurate to a few ulps of the logarithm.
pub fn power_mean_f64(x: &SchmidtVector, nu: f64) -> Result<f64> {
    check_nu(nu)?;
    Ok(LogsF64::new(x).log_mean(nu).exp())
}

// ---------------------------------------------------------------------------
// Single-copy probability

fn check_pair(x: &SchmidtVector, y: &SchmidtVector) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Shape { left: x.len(), right: y.len() });
    }
    Ok(())
}

/// `min_m F_m(x)/F_m(y)` over `m` with `F_m(y) > 0`, with the minimizing `m` (1-based).
pub fn vidal_with_index(x: &SchmidtVector, y: &SchmidtVector) -> Result<(BigRational, usize)> {
    check_pair(x, y)?;
    if !y.sum().is_positive() {
        return Err(Error::Degenerate("target sequence sums to zero".into()));
    }
    let fx = partial_sums(x);
    let fy = partial_sums(y);
    let mut best: Option<(BigRational, usize)> = None;
    for (m, (a, b)) in fx.iter().zip(fy.iter()).enumerate() {
        if b.is_zero() {
            continue;
        }
        let r = a / b;
        if best.as_ref().map_or(true, |(v, _)| r < *v) {
            best = Some((r, m + 1));
        }
    }
    Ok(best.expect("F_n(y) > 0"))
}

/// Largest `λ` with `x ≺^w λy`. Not clamped: unnormalized inputs may exceed 1.
pub fn vidal_probability(x: &SchmidtVector, y: &SchmidtVector) -> Result<BigRational> {
    Ok(vidal_with_index(x, y)?.0)
}

/// Normalized-state semantics: both sums must be 1 and the result is clamped to 1.
pub fn vidal_probability_normalized(x: &SchmidtVector, y: &SchmidtVector) -> Result<BigRational> {
    let one = BigRational::from_integer(1.into());
    if x.sum() != one || y.sum() != one {
        return Err(Error::Precondition("normalized mode requires unit sums".into()));
    }
    Ok(vidal_probability(x, y)?.min(one))
}

// ---------------------------------------------------------------------------
// Catalytic probability

struct Ratio {
    fx: LogsF64,
    fy: LogsF64,
    rx: LogsReal,
    ry: LogsReal,
    y_has_zero: bool,
}

impl Ratio {
    fn new(x: &SchmidtVector, y: &SchmidtVector, bits: usize) -> Self {
        Ratio {
            fx: LogsF64::new(x),
            fy: LogsF64::new(y),
            rx: LogsReal::new(x, bits),
            ry: LogsReal::new(y, bits),
            y_has_zero: y.zero_count() > 0,
        }
    }

    fn log_f64(&self, nu: f64) -> f64 {
        let ly = self.fy.log_mean(nu);
        if ly == f64::NEG_INFINITY {
            return f64::INFINITY;
        }
        self.fx.log_mean(nu) - ly
    }

    /// `log r(ν)`; `None` is `+∞`.
    fn log_real(&self, nu: f64) -> Option<Real> {
        let ly = self.ry.log_mean(nu)?;
        let lx = self.rx.log_mean(nu).expect("x is strictly positive");
        Some(lx - ly)
    }
}

fn grid_points(settings: &ConversionSettings, cap: f64, y_has_zero: bool) -> Vec<f64> {
    let g = settings.grid.max(16);
    let mut pts = Vec::with_capacity(g + g / 8 + 80);
    if y_has_zero {
        for k in 1..=g {
            pts.push(k as f64 / g as f64);
        }
        for j in 1..=60 {
            pts.push(2f64.powi(-j));
        }
    } else {
        let s = settings.sigma;
        let (u0, u1) = ((cap / s).tanh(), (1.0 / s).tanh());
        for k in 0..g {
            let u = u0 + (u1 - u0) * k as f64 / (g - 1) as f64;
            pts.push((s * u.atanh()).clamp(cap, 1.0));
        }
        for k in 1..g / 8 {
            pts.push(k as f64 / (g / 8) as f64);
        }
        pts.extend([cap, 0.0, 1.0]);
    }
    pts.retain(|v| v.is_finite());
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts
}

struct Scan {
    nus: Vec<f64>,
    logs: Vec<f64>,
}

fn scan(ratio: &Ratio, settings: &ConversionSettings, cap: f64) -> Scan {
    let nus = grid_points(settings, cap, ratio.y_has_zero);
    let logs = nus.iter().map(|&nu| ratio.log_f64(nu)).collect();
    Scan { nus, logs }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search of `log r` on `[a, b]`; returns the best point seen.
fn golden_f64(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, width: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= width {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

fn golden_real(ratio: &Ratio, mut a: f64, mut b: f64, width: f64) -> (f64, Real) {
    let f = |nu: f64| ratio.log_real(nu).expect("finite on the refinement bracket");
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..120 {
        if (b - a).abs() <= width || c >= d {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc.clone();
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd.clone();
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Refines a grid minimum bracketed by `[lo, hi]`; returns `(ν, log r(ν))`.
fn refine(ratio: &Ratio, lo: f64, hi: f64) -> (f64, Real) {
    let (nu0, _) = golden_f64(|nu| ratio.log_f64(nu), lo, hi, 1e-9 * (1.0 + lo.abs().max(hi.abs())));
    let w = 1e-6 * (1.0 + nu0.abs());
    let a = (nu0 - w).max(lo);
    let b = (nu0 + w).min(hi);
    golden_real(ratio, a, b, 1e-14 * (1.0 + nu0.abs()))
}

struct Minimum {
    e_lo: Option<BigRational>,
    e_hi: BigRational,
    /// Refined interior minimum, as `(ν, log r)`.
    interior: Option<(f64, Real)>,
    cap: f64,
    cap_unresolved: bool,
    diagnostics: Vec<String>,
}

const MAX_CAP_DOUBLINGS: usize = 6;

fn minimize(x: &SchmidtVector, y: &SchmidtVector, settings: &ConversionSettings) -> Minimum {
    let bits = settings.precision_bits;
    let ratio = Ratio::new(x, y, bits);
    let e_lo = if ratio.y_has_zero { None } else { Some(x.min() / y.min()) };
    let e_hi = x.sum() / y.sum();
    let tau = settings.tolerance;
    let mut diagnostics = Vec::new();

    let mut cap = settings.nu_cap.min(-1.0);
    let mut cap_unresolved = false;
    let mut sc = scan(&ratio, settings, cap);
    if let Some(lo) = &e_lo {
        let lo_log = ln_rational(lo);
        let mut doublings = 0;
        // A value below the −∞ limit at the cap means the dip continues past it.
        while sc.logs[0] < lo_log + (1.0 - tau).ln() && sc.logs[0] < sc.logs[1] {
            if doublings == MAX_CAP_DOUBLINGS {
                cap_unresolved = true;
                diagnostics.push(format!("ratio still decreasing at nu = {cap}"));
                break;
            }
            cap *= 2.0;
            doublings += 1;
            sc = scan(&ratio, settings, cap);
        }
        if doublings > 0 {
            diagnostics.push(format!("nu cap extended to {cap}"));
        }
    }

    let mut minima: Vec<usize> = (1..sc.nus.len() - 1)
        .filter(|&i| sc.logs[i].is_finite() && sc.logs[i] < sc.logs[i - 1] && sc.logs[i] <= sc.logs[i + 1])
        .collect();
    if cap_unresolved && sc.logs[0].is_finite() {
        minima.push(0);
    }
    minima.sort_by(|&a, &b| sc.logs[a].partial_cmp(&sc.logs[b]).unwrap());
    if minima.len() > settings.max_refinements {
        diagnostics.push(format!("refined {} of {} grid minima", settings.max_refinements, minima.len()));
        minima.truncate(settings.max_refinements);
    }
    let mut interior: Option<(f64, Real)> = None;
    for i in minima {
        let lo = sc.nus[i.saturating_sub(1)];
        let hi = sc.nus[(i + 1).min(sc.nus.len() - 1)];
        let cand = refine(&ratio, lo, hi);
        if interior.as_ref().map_or(true, |(_, v)| cand.1 < *v) {
            interior = Some(cand);
        }
    }
    Minimum { e_lo, e_hi, interior, cap, cap_unresolved, diagnostics }
}

fn real_of(q: &BigRational, bits: usize) -> Real {
    Real::from_rational(q, bits)
}

/// `min_{ν ∈ [−∞, 1]} A_ν(x)/A_ν(y)` with its minimizer and attainability verdict.
pub fn catalytic_probability(
    x: &SchmidtVector,
    y: &SchmidtVector,
    settings: &ConversionSettings,
) -> Result<ConversionReport> {
    check_pair(x, y)?;
    if !x.is_strictly_positive() {
        return Err(Error::Precondition("x must have only positive elements".into()));
    }
    let p_vidal = vidal_probability(x, y)?;
    let bits = settings.precision_bits;
    let tau = settings.tolerance;
    let one = Real::one(bits);

    if x.sorted() == y.sorted() {
        return Ok(ConversionReport {
            p_vidal,
            p_cat: one.clone(),
            p_cat_raw: one,
            argmin_nu: 1.0,
            attainability: Attainability::Certain,
            tolerance: tau,
            precision_bits: bits,
            endpoint_neg_inf: Some(BigRational::from_integer(1.into())),
            endpoint_one: BigRational::from_integer(1.into()),
            interior_min: None,
            nu_cap: settings.nu_cap,
            diagnostics: vec!["x and y are permutations of each other".into()],
        });
    }

    let mn = minimize(x, y, settings);
    let mut diagnostics = mn.diagnostics;
    let e_hi = real_of(&mn.e_hi, bits);
    let e_lo = mn.e_lo.as_ref().map(|q| real_of(q, bits));
    let (end_val, end_nu) = match &e_lo {
        Some(lo) if *lo < e_hi => (lo.clone(), f64::NEG_INFINITY),
        _ => (e_hi.clone(), 1.0),
    };
    let interior = mn.interior.map(|(nu, l)| (nu, l.exp()));
    let lower = Real::from_f64(1.0 - tau, bits);
    let upper = Real::from_f64(1.0 + tau, bits);

    let (raw, argmin) = match &interior {
        Some((nu, v)) if *v < end_val => (v.clone(), *nu),
        _ => (end_val.clone(), end_nu),
    };

    let attainability = if mn.cap_unresolved {
        Attainability::BoundaryUnknown
    } else if end_val >= one && interior.as_ref().map_or(true, |(_, v)| *v >= lower) {
        Attainability::Certain
    } else {
        match &interior {
            Some((nu, v)) if *v < &end_val * &lower => {
                // Confirm the strict interior dip at twice the precision.
                let end_q = match &mn.e_lo {
                    Some(lo) => lo.clone().min(mn.e_hi.clone()),
                    None => mn.e_hi.clone(),
                };
                let threshold = real_of(&end_q, 2 * bits) * Real::from_f64(1.0 - tau, 2 * bits);
                let confirmed = Ratio::new(x, y, 2 * bits)
                    .log_real(*nu)
                    .is_some_and(|l| l.exp() < threshold);
                if confirmed {
                    Attainability::NotAttainable
                } else {
                    diagnostics.push("interior minimum not confirmed at doubled precision".into());
                    Attainability::BoundaryUnknown
                }
            }
            Some((_, v)) if *v <= &end_val * &upper => {
                diagnostics.push("interior minimum within tolerance of an endpoint".into());
                Attainability::BoundaryUnknown
            }
            _ if end_nu == f64::NEG_INFINITY => Attainability::Attainable,
            _ => {
                diagnostics.push("minimum at nu = 1 with equal scaled sums".into());
                Attainability::BoundaryUnknown
            }
        }
    };
    let p_cat = if raw > one { one.clone() } else { raw.clone() };
    let p_cat = if attainability == Attainability::Certain { one } else { p_cat };

    Ok(ConversionReport {
        p_vidal,
        p_cat,
        p_cat_raw: raw,
        argmin_nu: argmin,
        attainability,
        tolerance: tau,
        precision_bits: bits,
        endpoint_neg_inf: mn.e_lo,
        endpoint_one: mn.e_hi,
        interior_min: interior,
        nu_cap: mn.cap,
        diagnostics,
    })
}

/// The sampled curve `(ν, A_ν(x)/A_ν(y))`, including both endpoints.
pub fn ratio_curve(x: &SchmidtVector, y: &SchmidtVector, settings: &ConversionSettings) -> Result<PowerMeanCurve> {
    check_pair(x, y)?;
    if !x.is_strictly_positive() {
        return Err(Error::Precondition("x must have only positive elements".into()));
    }
    if !y.sum().is_positive() {
        return Err(Error::Degenerate("target sequence sums to zero".into()));
    }
    let ratio = Ratio::new(x, y, 64);
    let mut samples = Vec::new();
    let e_lo = if ratio.y_has_zero { f64::INFINITY } else { rational_to_f64(&(x.min() / y.min())) };
    samples.push((f64::NEG_INFINITY, e_lo));
    if ratio.y_has_zero {
        samples.push((settings.nu_cap, f64::INFINITY));
        samples.push((0.0, f64::INFINITY));
    }
    let sc = scan(&ratio, settings, settings.nu_cap);
    for (nu, l) in sc.nus.iter().zip(sc.logs.iter()) {
        samples.push((*nu, l.exp()));
    }
    Ok(PowerMeanCurve {
        samples,
        nu_cap: settings.nu_cap,
        grid: settings.grid,
        sigma: settings.sigma,
        precision_bits: settings.precision_bits,
    })
}

/// Decides the strict power-mean inequalities `A_ν(x) > A_ν(y)` for `ν ∈ (−∞, 1)`.
///
/// Values shared by `x` and `y` are removed first; they cancel in `Σ x^ν − Σ y^ν`
/// but would pin the `ν → −∞` limit to 1.
pub fn check_supertrumping_conditions(
    x: &SchmidtVector,
    y: &SchmidtVector,
    settings: &ConversionSettings,
) -> Result<ConditionsReport> {
    check_pair(x, y)?;
    if !x.is_strictly_positive() {
        return Err(Error::Precondition("x must have only positive elements".into()));
    }
    let sum_exceeds = x.sum() > y.sum();
    let (xs, ys) = match strip_common(x, y) {
        Ok(p) => p,
        Err(Error::Degenerate(_)) => {
            return Ok(ConditionsReport {
                verdict: ConditionsVerdict::Fails { witness_nu: 1.0, ratio: 1.0 },
                infimum: Some(Real::one(settings.precision_bits)),
                argmin_nu: 1.0,
                sum_exceeds,
            })
        }
        Err(e) => return Err(e),
    };
    if ys.sum().is_zero() {
        return Ok(ConditionsReport { verdict: ConditionsVerdict::Holds, infimum: None, argmin_nu: 1.0, sum_exceeds });
    }
    let bits = settings.precision_bits;
    let tau = settings.tolerance;
    let mn = minimize(&xs, &ys, settings);
    let mut inf = real_of(&mn.e_hi, bits);
    let mut arg = 1.0;
    if let Some(lo) = &mn.e_lo {
        let lo = real_of(lo, bits);
        if lo < inf {
            inf = lo;
            arg = f64::NEG_INFINITY;
        }
    }
    if let Some((nu, l)) = &mn.interior {
        let v = l.exp();
        if v < inf {
            inf = v;
            arg = *nu;
        }
    }
    let verdict = if inf <= Real::from_f64(1.0 - tau, bits) {
        ConditionsVerdict::Fails { witness_nu: arg, ratio: inf.to_f64() }
    } else if inf > Real::from_f64(1.0 + tau, bits) && !mn.cap_unresolved {
        ConditionsVerdict::Holds
    } else {
        ConditionsVerdict::Boundary
    };
    Ok(ConditionsReport { verdict, infimum: Some(inf), argmin_nu: arg, sum_exceeds })
}

/// Exact `F_m` access re-exported for callers that work with this module alone.
pub fn smallest_sum(x: &SchmidtVector, m: usize) -> Result<BigRational> {
    f_m(x, m)
}
