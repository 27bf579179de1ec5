//! Numeric factorization into real irreducible factors.
//!
//! Roots come from Aberth iteration in `f64` followed by Newton polishing at
//! high precision. The number of real roots of each square-free part is known
//! exactly from its Sturm sequence, so real/complex classification never
//! depends on a threshold. Factors whose roots are rational, or whose real
//! quadratic has rational coefficients, are recognised and kept exact.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::poly::{count_real_roots, Polynomial};
use super::series::simplest_in_interval;
use crate::error::{Error, Result};
use crate::number::{format_rational, rational_to_f64};
use crate::real::Real;

/// `(1 − ξs)`; `exact` is set when `ξ` is rational.
#[derive(Clone, Debug)]
pub struct LinearFactor {
    pub xi: Real,
    pub exact: Option<BigRational>,
}

/// `(1 − 2ξs + λs²)` with `λ = ξ² + η²`, `η > 0`.
#[derive(Clone, Debug)]
pub struct QuadraticFactor {
    pub xi: Real,
    pub eta: Real,
    pub lambda: Real,
    /// Exact `(ξ, λ)` when both are rational.
    pub exact: Option<(BigRational, BigRational)>,
}

/// `γ(s) = A·s^r·Π(1 − ξ_i s)·Π(1 − 2ξ'_j s + λ_j s²)`.
#[derive(Clone, Debug)]
pub struct FactorizedPoly {
    pub leading: BigRational,
    pub root0_multiplicity: usize,
    /// Repeated roots appear repeatedly.
    pub linear_factors: Vec<LinearFactor>,
    pub quadratic_factors: Vec<QuadraticFactor>,
    /// Largest coefficient error of the expanded factorization, relative to the largest coefficient.
    pub residual: f64,
    pub precision_bits: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorSummary {
    pub leading: String,
    pub root0_multiplicity: usize,
    pub linear: Vec<String>,
    /// `(ξ, λ)` per quadratic factor.
    pub quadratic: Vec<(String, String)>,
    pub residual: f64,
}

impl FactorizedPoly {
    pub fn degree(&self) -> usize {
        self.root0_multiplicity + self.linear_factors.len() + 2 * self.quadratic_factors.len()
    }

    pub fn summary(&self) -> FactorSummary {
        let show = |r: &Real, e: Option<&BigRational>| match e {
            Some(q) => format_rational(q),
            None => r.to_sci_string(30),
        };
        FactorSummary {
            leading: format_rational(&self.leading),
            root0_multiplicity: self.root0_multiplicity,
            linear: self.linear_factors.iter().map(|f| show(&f.xi, f.exact.as_ref())).collect(),
            quadratic: self
                .quadratic_factors
                .iter()
                .map(|f| {
                    (
                        show(&f.xi, f.exact.as_ref().map(|e| &e.0)),
                        show(&f.lambda, f.exact.as_ref().map(|e| &e.1)),
                    )
                })
                .collect(),
            residual: self.residual,
        }
    }
}

// ---------------------------------------------------------------------------
// complex arithmetic at working precision

#[derive(Clone, Debug)]
struct Cx {
    re: Real,
    im: Real,
}

impl Cx {
    fn new(re: Real, im: Real) -> Self {
        Cx { re, im }
    }

    fn add(&self, o: &Cx) -> Cx {
        Cx::new(&self.re + &o.re, &self.im + &o.im)
    }

    fn sub(&self, o: &Cx) -> Cx {
        Cx::new(&self.re - &o.re, &self.im - &o.im)
    }

    fn mul(&self, o: &Cx) -> Cx {
        Cx::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }

    fn div(&self, o: &Cx) -> Cx {
        let den = &o.re * &o.re + &o.im * &o.im;
        Cx::new(
            (&self.re * &o.re + &self.im * &o.im) / &den,
            (&self.im * &o.re - &self.re * &o.im) / &den,
        )
    }

    fn norm(&self) -> Real {
        (&self.re * &self.re + &self.im * &self.im).sqrt()
    }
}

/// `(p(z), p'(z))` by Horner.
fn horner(coeffs: &[Real], z: &Cx, bits: usize) -> (Cx, Cx) {
    let zero = || Cx::new(Real::zero(bits), Real::zero(bits));
    let mut p = zero();
    let mut dp = zero();
    for c in coeffs.iter().rev() {
        dp = dp.mul(z).add(&p);
        p = p.mul(z).add(&Cx::new(c.clone(), Real::zero(bits)));
    }
    (p, dp)
}

/// Aberth–Ehrlich iteration on `f64` coefficients (ascending order).
fn aberth(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let c: Vec<f64> = coeffs.iter().map(|v| v / lead).collect();
    let radius = 1.0 + c[..d].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius * 0.5, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / d as f64 + 0.4))
        .collect();
    let eval = |x: Complex64| {
        let mut p = Complex64::zero();
        let mut dp = Complex64::zero();
        for &a in c.iter().rev() {
            dp = dp * x + p;
            p = p * x + a;
        }
        (p, dp)
    };
    for _ in 0..2000 {
        let mut biggest = 0.0f64;
        for i in 0..d {
            let (p, dp) = eval(z[i]);
            if p == Complex64::zero() {
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..d).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * sum);
            if w.is_finite() {
                z[i] -= w;
                biggest = biggest.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if biggest < 1e-15 {
            return Ok(z);
        }
    }
    // Polishing at high precision usually rescues a slow finish.
    if z.iter().all(|v| v.is_finite()) {
        Ok(z)
    } else {
        Err(Error::Numeric("root iteration diverged".into()))
    }
}

/// Newton polish at `bits` precision.
fn polish(coeffs: &[Real], z0: Complex64, real_only: bool, bits: usize) -> Cx {
    let mut z = Cx::new(Real::from_f64(z0.re, bits), Real::from_f64(if real_only { 0.0 } else { z0.im }, bits));
    let eps = Real::from_f64(2f64.powi(-(bits as i32) + 8), bits);
    for _ in 0..200 {
        let (p, dp) = horner(coeffs, &z, bits);
        if dp.norm().is_zero() {
            break;
        }
        let mut step = p.div(&dp);
        if real_only {
            step.im = Real::zero(bits);
        }
        z = z.sub(&step);
        if step.norm() <= &eps * (Real::one(bits) + z.norm()) {
            break;
        }
    }
    z
}

/// Roots of a square-free rational polynomial: real roots and upper-half-plane complex roots.
fn roots_of_square_free(p: &Polynomial, bits: usize) -> Result<(Vec<Real>, Vec<Cx>)> {
    let d = p.degree().unwrap_or(0);
    if d == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let scale = p.coeffs().iter().map(|c| c.abs()).max().unwrap();
    let rc: Vec<Real> = p.coeffs().iter().map(|c| Real::from_rational(&(c / &scale), bits)).collect();
    let fc: Vec<f64> = p.coeffs().iter().map(|c| rational_to_f64(&(c / &scale))).collect();
    let approx = aberth(&fc)?;
    let n_real = count_real_roots(p);
    if (d - n_real) % 2 != 0 {
        return Err(Error::Numeric("odd number of complex roots".into()));
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| approx[a].im.abs().partial_cmp(&approx[b].im.abs()).unwrap());
    let reals: Vec<Real> = order[..n_real].iter().map(|&i| polish(&rc, approx[i], true, bits).re).collect();
    let mut uppers: Vec<Cx> = order[n_real..]
        .iter()
        .filter(|&&i| approx[i].im > 0.0)
        .map(|&i| polish(&rc, approx[i], false, bits))
        .collect();
    for z in uppers.iter_mut() {
        if z.im.is_negative() {
            z.im = -&z.im;
        }
    }
    if 2 * uppers.len() != d - n_real {
        return Err(Error::Numeric(format!(
            "conjugate pairing failed: {} real roots, {} upper roots, degree {d}",
            n_real,
            uppers.len()
        )));
    }
    Ok((reals, uppers))
}

fn snap_linear(p: &Polynomial, xi: &Real) -> Option<BigRational> {
    let v = xi.to_rational()?;
    let w = BigRational::new(1.into(), num_bigint::BigInt::from(10u8).pow(20));
    let cand = simplest_in_interval(&(&v - &w), &(&v + &w));
    p.eval(&cand).is_zero().then_some(cand)
}

fn snap_quadratic(p: &Polynomial, xi: &Real, lambda: &Real) -> Option<(BigRational, BigRational)> {
    let w = BigRational::new(1.into(), num_bigint::BigInt::from(10u8).pow(20));
    let near = |r: &Real| r.to_rational().map(|v| simplest_in_interval(&(&v - &w), &(&v + &w)));
    let (xi_q, la_q) = (near(xi)?, near(lambda)?);
    let two = BigRational::from_integer(2.into());
    let quad = Polynomial::new(vec![la_q.clone(), -(&two * &xi_q), BigRational::from_integer(1.into())]);
    (la_q > &xi_q * &xi_q && p.div_rem(&quad).1.is_zero()).then_some((xi_q, la_q))
}

/// Factors `γ` into real irreducible factors normalized to constant term 1.
pub fn factor_real(gamma: &Polynomial, tolerance: f64, bits: usize) -> Result<FactorizedPoly> {
    if gamma.is_zero() {
        return Err(Error::Degenerate("zero polynomial".into()));
    }
    let r = gamma.low_order();
    let g = gamma.shift_down(r);
    let leading = g.coeff(0);
    // Roots of the reversed polynomial are the ξ of the factors (1 − ξs).
    let rev = g.reversed();
    let mut linear = Vec::new();
    let mut quadratic = Vec::new();
    for (part, mult) in rev.square_free_parts() {
        let deg = part.degree().unwrap_or(0);
        let (reals, uppers) = if deg == 1 {
            let root = -part.coeff(0) / part.coeff(1);
            linear.extend((0..mult).map(|_| LinearFactor { xi: Real::from_rational(&root, bits), exact: Some(root.clone()) }));
            continue;
        } else if deg == 2 && count_real_roots(&part) == 0 {
            // Monic w² + b w + c: ξ = −b/2, λ = c.
            let xi = -part.coeff(1) / BigRational::from_integer(2.into());
            let lambda = part.coeff(0);
            let eta = Real::from_rational(&(&lambda - &xi * &xi), bits).sqrt();
            for _ in 0..mult {
                quadratic.push(QuadraticFactor {
                    xi: Real::from_rational(&xi, bits),
                    eta: eta.clone(),
                    lambda: Real::from_rational(&lambda, bits),
                    exact: Some((xi.clone(), lambda.clone())),
                });
            }
            continue;
        } else {
            roots_of_square_free(&part, bits)?
        };
        for xi in reals {
            let exact = snap_linear(&part, &xi);
            for _ in 0..mult {
                linear.push(LinearFactor { xi: xi.clone(), exact: exact.clone() });
            }
        }
        for z in uppers {
            let lambda = &z.re * &z.re + &z.im * &z.im;
            let exact = snap_quadratic(&part, &z.re, &lambda);
            for _ in 0..mult {
                quadratic.push(QuadraticFactor { xi: z.re.clone(), eta: z.im.clone(), lambda: lambda.clone(), exact: exact.clone() });
            }
        }
    }
    let mut f = FactorizedPoly {
        leading,
        root0_multiplicity: r,
        linear_factors: linear,
        quadratic_factors: quadratic,
        residual: 0.0,
        precision_bits: bits,
    };
    f.residual = reconstruction_residual(&f, gamma, bits);
    if f.degree() != gamma.degree().unwrap_or(0) {
        return Err(Error::Numeric("factor degrees do not add up".into()));
    }
    if !(f.residual <= tolerance) {
        return Err(Error::Numeric(format!("factorization residual {:e} exceeds tolerance {tolerance:e}", f.residual)));
    }
    Ok(f)
}

/// Expands the factorization at working precision and compares coefficients.
pub fn reconstruction_residual(f: &FactorizedPoly, gamma: &Polynomial, bits: usize) -> f64 {
    let mut acc = vec![Real::from_rational(&f.leading, bits)];
    let mul = |acc: &Vec<Real>, fac: &[Real]| {
        let mut out = vec![Real::zero(bits); acc.len() + fac.len() - 1];
        for (i, a) in acc.iter().enumerate() {
            for (j, b) in fac.iter().enumerate() {
                out[i + j] = &out[i + j] + a * b;
            }
        }
        out
    };
    for lf in &f.linear_factors {
        acc = mul(&acc, &[Real::one(bits), -&lf.xi]);
    }
    for qf in &f.quadratic_factors {
        let two = Real::from_i64(2, bits);
        acc = mul(&acc, &[Real::one(bits), -(&two * &qf.xi), qf.lambda.clone()]);
    }
    let scale = gamma.coeffs().iter().map(|c| c.abs()).max().unwrap_or_else(BigRational::zero);
    if scale.is_zero() {
        return 0.0;
    }
    let scale = Real::from_rational(&scale, bits);
    let mut worst = Real::zero(bits);
    for (k, c) in acc.iter().enumerate() {
        let src = Real::from_rational(&gamma.coeff(k + f.root0_multiplicity), bits);
        worst = worst.max((c - src).abs() / &scale);
    }
    worst.to_f64()
}
