use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::number::lcm_all;
use crate::sequences::{Catalyst, SchmidtVector};

/// Default bound on the number of `(x_i, c_ℓ)` product runs per side.
pub const DEFAULT_PRODUCT_CAP: u128 = 10_000_000;

/// Exact check of `x⊗c ≺^w y⊗c` with the default size cap.
pub fn verify_catalyst(x: &SchmidtVector, y: &SchmidtVector, c: &Catalyst) -> Result<bool> {
    verify_catalyst_with_cap(x, y, c, DEFAULT_PRODUCT_CAP)
}

pub(crate) fn common_denominator<'a>(values: impl Iterator<Item = &'a BigRational>) -> BigInt {
    lcm_all(values.map(|v| v.denom()))
}

fn scaled(v: &BigRational, l: &BigInt) -> BigInt {
    v.numer() * (l / v.denom())
}

/// Sorted `(value, multiplicity)` runs of `L_x·L_c·(x ⊗ c)`, all integers.
pub(crate) fn integer_runs(x: &SchmidtVector, c: &Catalyst, lx: &BigInt, lc: &BigInt) -> Vec<(BigInt, BigUint)> {
    let mut xs: Vec<BigInt> = x.elems().iter().map(|v| scaled(v, lx)).collect();
    xs.sort();
    let mut xr: Vec<(BigInt, BigUint)> = Vec::new();
    for v in xs {
        match xr.last_mut() {
            Some((last, n)) if *last == v => *n += 1u32,
            _ => xr.push((v, BigUint::one())),
        }
    }
    let cs: Vec<(BigInt, &BigUint)> = c.entries().iter().map(|(v, n)| (scaled(v, lc), n)).collect();
    let mut runs: Vec<(BigInt, BigUint)> =
        xr.iter().flat_map(|(xv, xn)| cs.iter().map(move |(cv, cn)| (xv * cv, xn * *cn))).collect();
    runs.sort_by(|a, b| a.0.cmp(&b.0));
    let mut merged: Vec<(BigInt, BigUint)> = Vec::with_capacity(runs.len());
    for (v, n) in runs {
        match merged.last_mut() {
            Some((last, m)) if *last == v => *m += n,
            _ => merged.push((v, n)),
        }
    }
    merged
}

fn distinct(x: &SchmidtVector) -> usize {
    let mut v: Vec<&BigRational> = x.elems().iter().collect();
    v.sort();
    v.dedup();
    v.len()
}

/// `F_m(a) >= F_m(b)` for every `m`, checked at the merged run boundaries
/// (the difference is linear in between).
fn runs_supermajorized(a: &[(BigInt, BigUint)], b: &[(BigInt, BigUint)]) -> bool {
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (a.first().map(|r| r.1.clone()), b.first().map(|r| r.1.clone()));
    let (mut sa, mut sb) = (BigInt::zero(), BigInt::zero());
    while let (Some(na), Some(nb)) = (ra.clone(), rb.clone()) {
        let step = na.clone().min(nb.clone());
        let st = BigInt::from(step.clone());
        sa += &a[i].0 * &st;
        sb += &b[j].0 * &st;
        if sa < sb {
            return false;
        }
        let (la, lb) = (na - &step, nb - &step);
        ra = if la.is_zero() {
            i += 1;
            a.get(i).map(|r| r.1.clone())
        } else {
            Some(la)
        };
        rb = if lb.is_zero() {
            j += 1;
            b.get(j).map(|r| r.1.clone())
        } else {
            Some(lb)
        };
    }
    true
}

/// Exact check of `x⊗c ≺^w y⊗c`.
///
/// Everything is rescaled to integers by a common denominator, which leaves
/// the order unchanged. The cap limits the number of distinct `(x_i, c_ℓ)`
/// pairs per side rather than the catalyst dimension.
pub fn verify_catalyst_with_cap(x: &SchmidtVector, y: &SchmidtVector, c: &Catalyst, cap: u128) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::Shape { left: x.len(), right: y.len() });
    }
    let entries = c.entries().len() as u128;
    let size = (distinct(x).max(distinct(y)) as u128).saturating_mul(entries);
    if size > cap {
        return Err(Error::SizeCap { size, cap });
    }
    let lx = common_denominator(x.elems().iter().chain(y.elems()));
    let lc = common_denominator(c.entries().iter().map(|(v, _)| v));
    let rx = integer_runs(x, c, &lx, &lc);
    let ry = integer_runs(y, c, &lx, &lc);
    Ok(runs_supermajorized(&rx, &ry))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::CharacteristicFunction;
    use proptest::prelude::*;

    fn v(items: &[&str]) -> SchmidtVector {
        SchmidtVector::parse(items).unwrap()
    }

    #[test]
    fn examples() {
        let x = v(&["0.4", "0.4", "0.1", "0.1"]);
        let y = v(&["0.5", "0.25", "0.25", "0"]);
        assert!(verify_catalyst(&x, &y, &Catalyst::parse(&["0.6", "0.4"]).unwrap()).unwrap());
        assert!(verify_catalyst(&x, &x, &Catalyst::parse(&["0.9", "0.1"]).unwrap()).unwrap());
        assert!(!verify_catalyst(&x, &y, &Catalyst::trivial()).unwrap());
        let c = Catalyst::parse(&["1", "1", "2", "4"]).unwrap();
        assert!(verify_catalyst(&v(&["2", "2", "2", "8"]), &v(&["1", "1", "4", "4"]), &c).unwrap());
    }

    #[test]
    fn size_cap() {
        let x = v(&["1", "2"]);
        let c = Catalyst::parse(&["1", "2", "3"]).unwrap();
        assert!(matches!(verify_catalyst_with_cap(&x, &x, &c, 5), Err(Error::SizeCap { size: 6, cap: 5 })));
        assert!(verify_catalyst(&x, &v(&["1"]), &c).is_err());
    }

    proptest! {
        #[test]
        fn agrees_with_characteristic_functions(
            xs in prop::collection::vec((0u32..6, 1u32..6), 1..5),
            ys in prop::collection::vec((0u32..6, 1u32..6), 1..5),
            cs in prop::collection::vec((1u32..6, 1u32..4, 1u32..3), 1..4),
        ) {
            let n = xs.len().min(ys.len());
            prop_assume!(ys[..n].iter().any(|p| p.0 > 0));
            let frac = |(a, b): (u32, u32)| BigRational::new(a.into(), b.into());
            let x = SchmidtVector::new(xs[..n].iter().map(|&p| frac(p) + BigRational::new(1.into(), 7.into())).collect()).unwrap();
            let y = SchmidtVector::new(ys[..n].iter().map(|&p| frac(p)).collect()).unwrap();
            let c = Catalyst::new(cs.iter().map(|&(a, b, m)| (frac((a, b)), BigUint::from(m))).collect()).unwrap();
            let hx = CharacteristicFunction::of_tensor(&x, &c, None).unwrap();
            let hy = CharacteristicFunction::of_tensor(&y, &c, None).unwrap();
            prop_assert_eq!(verify_catalyst(&x, &y, &c).unwrap(), hx.is_supermajorized_by(&hy).unwrap());
        }
    }
}
