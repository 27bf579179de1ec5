//! `I_ν = ∫ (H_{y⊗c} − H_{x⊗c})(t) t^{ν−2} dt`, by closed form and by quadrature.
//!
//! For a valid catalyst the integrand is nonnegative, so every `I_ν` is
//! positive; the closed form then forces `A_ν(x) > A_ν(y)`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::verify::{common_denominator, integer_runs, verify_catalyst};
use crate::error::{Error, Result};
use crate::number::{ln_bigint, ln_rational, rational_to_f64};
use crate::sequences::{Catalyst, SchmidtVector};

pub const DEFAULT_NU_SAMPLES: [f64; 7] = [-2.0, -1.0, -0.5, 0.0, 0.25, 0.5, 0.75];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NecessitySample {
    pub nu: f64,
    pub closed_form: f64,
    pub quadrature: f64,
    pub relative_difference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NecessityCertificate {
    pub samples: Vec<NecessitySample>,
    /// Requested `ν <= 0` dropped because `y` has zeros.
    pub skipped: Vec<f64>,
    pub all_positive: bool,
    pub max_relative_difference: f64,
}

impl NecessityCertificate {
    pub fn consistent(&self, tolerance: f64) -> bool {
        self.all_positive && self.max_relative_difference <= tolerance
    }
}

fn power_sum(v: &[(f64, f64)], nu: f64) -> f64 {
    v.iter().map(|(ln, w)| w * (nu * ln).exp()).sum()
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Gauss–Kronrod 7/15 pair on `[a, b]`: `(kronrod, |kronrod − gauss|)`.
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let d = h * XGK[j];
        let s = f(c - d) + f(c + d);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (k, err) = gk15(f, a, b);
    if err <= tol.max(1e-15 * k.abs()) || depth == 0 || !err.is_finite() {
        return k;
    }
    let m = 0.5 * (a + b);
    adaptive(f, a, m, tol / 2.0, depth - 1) + adaptive(f, m, b, tol / 2.0, depth - 1)
}

/// `ln(e^z − 1)` for `z > 0`.
fn ln_expm1(z: f64) -> f64 {
    if z > 30.0 {
        z + (-(-z).exp()).ln_1p()
    } else {
        z.exp_m1().ln()
    }
}

/// `Δ = H_{y⊗c} − H_{x⊗c}` at its positive breakpoints, in logs.
///
/// `Δ` is piecewise linear, zero at `t = 0` and constant past the last
/// breakpoint. Its values at the breakpoints are computed exactly on the
/// integer-scaled runs, so only the final conversion rounds.
struct Breakpoints {
    ln_t: Vec<f64>,
    /// `ln Δ(t_k)`, `−∞` where `Δ` vanishes.
    ln_delta: Vec<f64>,
}

fn breakpoints(x: &SchmidtVector, y: &SchmidtVector, c: &Catalyst, scale: &BigUint) -> Result<Breakpoints> {
    let lx = common_denominator(x.elems().iter().chain(y.elems()));
    let lc = common_denominator(c.entries().iter().map(|(v, _)| v));
    let rx = integer_runs(x, c, &lx, &lc);
    let ry = integer_runs(y, c, &lx, &lc);
    let ln_unit = ln_bigint(&(&lx * &lc));
    let ln_scale = ln_bigint(&BigInt::from(scale.clone()));

    let (mut i, mut j) = (0, 0);
    let (mut prev, mut delta, mut slope) = (BigInt::zero(), BigInt::zero(), BigInt::zero());
    let mut out = Breakpoints { ln_t: Vec::new(), ln_delta: Vec::new() };
    while i < rx.len() || j < ry.len() {
        let t = match (rx.get(i), ry.get(j)) {
            (Some(a), Some(b)) => a.0.clone().min(b.0.clone()),
            (Some(a), None) => a.0.clone(),
            (None, Some(b)) => b.0.clone(),
            (None, None) => unreachable!(),
        };
        delta += &slope * (&t - &prev);
        if delta.is_negative() {
            return Err(Error::Numeric("catalyst leaves H_{y⊗c} below H_{x⊗c}".into()));
        }
        while j < ry.len() && ry[j].0 == t {
            slope += BigInt::from(ry[j].1.clone());
            j += 1;
        }
        while i < rx.len() && rx[i].0 == t {
            slope -= BigInt::from(rx[i].1.clone());
            i += 1;
        }
        if t.is_positive() {
            out.ln_t.push(ln_bigint(&t) - ln_unit);
            out.ln_delta.push(if delta.is_zero() { f64::NEG_INFINITY } else { ln_bigint(&delta) - ln_unit - ln_scale });
        }
        prev = t;
    }
    debug_assert!(slope.is_zero(), "equal lengths give equal total weight");
    Ok(out)
}

/// `∫_0^∞ Δ(t) t^{ν−2} dt` over the breakpoints, integrating in `u = ln t`.
fn quadrature(bp: &Breakpoints, nu: f64) -> f64 {
    let Some(&a0) = bp.ln_t.first() else { return 0.0 };
    // On (0, t_0] the difference is linear through the origin.
    let mut total = if bp.ln_delta[0] == f64::NEG_INFINITY { 0.0 } else { (bp.ln_delta[0] + (nu - 1.0) * a0).exp() / nu };
    for k in 0..bp.ln_t.len() - 1 {
        let (a, b) = (bp.ln_t[k], bp.ln_t[k + 1]);
        let (da, db) = (bp.ln_delta[k], bp.ln_delta[k + 1]);
        let span = ln_expm1(b - a);
        // Δ(e^u) = w_a·Δ_a + w_b·Δ_b with nonnegative weights, kept in logs.
        let f = move |u: f64| {
            let ln_wb = ln_expm1(u - a) - span;
            let ln_wa = (u - a) + ln_expm1(b - u) - span;
            let e = (nu - 1.0) * u;
            (da + ln_wa + e).exp() + (db + ln_wb + e).exp()
        };
        let scale = gk15(&f, a, b).0.abs();
        total += adaptive(&f, a, b, 1e-13 * scale.max(f64::MIN_POSITIVE), 30);
    }
    let last = bp.ln_t.len() - 1;
    total + (bp.ln_delta[last] + (nu - 1.0) * bp.ln_t[last]).exp() / (1.0 - nu)
}

/// Evaluates `I_ν` both ways at each sample `ν < 1`.
///
/// `ν <= 0` is only meaningful for strictly positive `y`; such samples are
/// skipped (and listed) otherwise.
pub fn necessity_certificate(
    x: &SchmidtVector,
    y: &SchmidtVector,
    c: &Catalyst,
    nus: &[f64],
) -> Result<NecessityCertificate> {
    if !x.is_strictly_positive() {
        return Err(Error::Refused("x must have only positive elements".into()));
    }
    if x.sorted() == y.sorted() {
        return Err(Error::Refused("x and y coincide up to order".into()));
    }
    if !verify_catalyst(x, y, c)? {
        return Err(Error::Refused("catalyst does not verify".into()));
    }
    if let Some(nu) = nus.iter().find(|&&v| !(v < 1.0)) {
        return Err(Error::Domain(format!("nu = {nu} must be below 1")));
    }
    let lnx: Vec<(f64, f64)> = x.elems().iter().map(|v| (ln_rational(v), 1.0)).collect();
    let y_positive = y.is_strictly_positive();
    let lny: Vec<(f64, f64)> = y.elems().iter().filter(|v| v.is_positive()).map(|v| (ln_rational(v), 1.0)).collect();
    // Both sides are linear in the catalyst weights, so dividing them by the
    // largest multiplicity keeps huge catalysts finite without changing signs
    // or relative differences.
    let scale = c.entries().iter().map(|(_, n)| n).max().cloned().unwrap_or_else(BigUint::one);
    let weight = |n: &BigUint| rational_to_f64(&BigRational::new(n.clone().into(), scale.clone().into()));
    let lnc: Vec<(f64, f64)> = c.entries().iter().map(|(v, n)| (ln_rational(v), weight(n))).collect();
    let dim: f64 = lnc.iter().map(|(_, w)| w).sum();
    let bp = breakpoints(x, y, c, &scale)?;

    let mut samples = Vec::new();
    let mut skipped = Vec::new();
    for &nu in nus {
        if nu <= 0.0 && !y_positive {
            skipped.push(nu);
            continue;
        }
        let closed_form = if nu == 0.0 {
            let sx: f64 = lnx.iter().map(|(l, w)| l * w).sum();
            let sy: f64 = lny.iter().map(|(l, w)| l * w).sum();
            (sx - sy) * dim
        } else {
            (power_sum(&lnx, nu) - power_sum(&lny, nu)) * power_sum(&lnc, nu) / (nu * (1.0 - nu))
        };
        let quadrature = quadrature(&bp, nu);
        let relative_difference = (quadrature - closed_form).abs() / closed_form.abs().max(f64::MIN_POSITIVE);
        samples.push(NecessitySample { nu, closed_form, quadrature, relative_difference });
    }
    let all_positive = samples.iter().all(|s| s.closed_form > 0.0);
    let max_relative_difference = samples.iter().map(|s| s.relative_difference).fold(0.0, f64::max);
    Ok(NecessityCertificate { samples, skipped, all_positive, max_relative_difference })
}
