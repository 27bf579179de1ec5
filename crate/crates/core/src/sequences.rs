//! Schmidt coefficient sequences and the (super-)majorization predicates.
//!
//! All comparisons are exact. Large tensor products are handled in run-length
//! form ([`CharacteristicFunction`]) so catalysts with huge multiplicities never
//! need to be expanded.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number::{format_rational, parse_rational};

/// Largest flat sequence [`tensor`] will materialize.
pub const TENSOR_EXPANSION_CAP: u128 = 100_000_000;

/// A finite sequence of nonnegative exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SchmidtVector {
    elems: Vec<BigRational>,
}

impl SchmidtVector {
    /// Requires a nonempty sequence of nonnegative values with at least one positive entry.
    pub fn new(elems: Vec<BigRational>) -> Result<Self> {
        if elems.is_empty() {
            return Err(Error::InvalidSequence("empty sequence".into()));
        }
        if let Some(v) = elems.iter().find(|v| v.is_negative()) {
            return Err(Error::InvalidSequence(format!("negative element {v}")));
        }
        if elems.iter().all(Zero::is_zero) {
            return Err(Error::InvalidSequence("all elements are zero".into()));
        }
        Ok(SchmidtVector { elems })
    }

    // Stripping can leave an all-zero remainder; callers inside the crate accept that.
    pub(crate) fn from_raw(elems: Vec<BigRational>) -> Self {
        SchmidtVector { elems }
    }

    pub fn parse<S: AsRef<str>>(items: &[S]) -> Result<Self> {
        let elems = items.iter().map(|s| parse_rational(s.as_ref())).collect::<Result<Vec<_>>>()?;
        SchmidtVector::new(elems)
    }

    pub fn from_integers(items: &[i64]) -> Result<Self> {
        SchmidtVector::new(items.iter().map(|&v| BigRational::from_integer(v.into())).collect())
    }

    pub fn elems(&self) -> &[BigRational] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.elems.iter().all(Signed::is_positive)
    }

    pub fn zero_count(&self) -> usize {
        self.elems.iter().filter(|v| v.is_zero()).count()
    }

    pub fn sum(&self) -> BigRational {
        self.elems.iter().fold(BigRational::zero(), |acc, v| acc + v)
    }

    pub fn min(&self) -> BigRational {
        self.elems.iter().min().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn max(&self) -> BigRational {
        self.elems.iter().max().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn sorted(&self) -> SchmidtVector {
        let mut elems = self.elems.clone();
        elems.sort();
        SchmidtVector { elems }
    }

    /// Multiplies every element by `factor` (which must be positive).
    pub fn scaled(&self, factor: &BigRational) -> Result<SchmidtVector> {
        if !factor.is_positive() {
            return Err(Error::Domain(format!("scale factor {factor} must be positive")));
        }
        Ok(SchmidtVector { elems: self.elems.iter().map(|v| v * factor).collect() })
    }

    /// Rescales to unit sum.
    pub fn normalized(&self) -> SchmidtVector {
        let s = self.sum();
        SchmidtVector { elems: self.elems.iter().map(|v| v / &s).collect() }
    }

    /// Appends explicit zeros up to length `n`.
    pub fn padded(&self, n: usize) -> SchmidtVector {
        let mut elems = self.elems.clone();
        elems.resize(n.max(elems.len()), BigRational::zero());
        SchmidtVector { elems }
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.elems.iter().map(format_rational).collect()
    }

    pub fn f_m(&self, m: usize) -> Result<BigRational> {
        f_m(self, m)
    }
}

/// A catalyst: positive values with positive integer multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Catalyst {
    entries: Vec<(BigRational, BigUint)>,
}

impl Catalyst {
    pub fn new(entries: Vec<(BigRational, BigUint)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidSequence("empty catalyst".into()));
        }
        for (v, m) in &entries {
            if !v.is_positive() {
                return Err(Error::InvalidSequence(format!("catalyst value {v} must be positive")));
            }
            if m.is_zero() {
                return Err(Error::InvalidSequence(format!("catalyst value {v} has multiplicity 0")));
            }
        }
        Ok(Catalyst { entries })
    }

    /// The dimension-one catalyst `(1)`.
    pub fn trivial() -> Self {
        Catalyst { entries: vec![(BigRational::one(), BigUint::one())] }
    }

    /// Each value with multiplicity one.
    pub fn from_values(values: &[BigRational]) -> Result<Self> {
        Catalyst::new(values.iter().map(|v| (v.clone(), BigUint::one())).collect())
    }

    pub fn parse<S: AsRef<str>>(values: &[S]) -> Result<Self> {
        let vals = values.iter().map(|s| parse_rational(s.as_ref())).collect::<Result<Vec<_>>>()?;
        Catalyst::from_values(&vals)
    }

    pub fn entries(&self) -> &[(BigRational, BigUint)] {
        &self.entries
    }

    pub fn dimension(&self) -> BigUint {
        self.entries.iter().map(|(_, m)| m).sum()
    }

    /// Number of `(value, multiplicity)` entries.
    pub fn distinct_len(&self) -> usize {
        self.entries.len()
    }

    /// Flat sequence with multiplicities expanded.
    pub fn expand(&self) -> Result<SchmidtVector> {
        let dim = self.dimension();
        let size = dim.to_u128().unwrap_or(u128::MAX);
        if size > TENSOR_EXPANSION_CAP {
            return Err(Error::SizeCap { size, cap: TENSOR_EXPANSION_CAP });
        }
        let mut elems = Vec::with_capacity(size as usize);
        for (v, m) in &self.entries {
            let k = m.to_usize().expect("bounded above");
            elems.extend(std::iter::repeat(v.clone()).take(k));
        }
        Ok(SchmidtVector { elems })
    }
}

/// The characteristic function `H(t) = Σ (t − v)^+` of a multiset, stored as
/// its sorted breakpoints with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacteristicFunction {
    breakpoints: Vec<(BigRational, BigUint)>,
}

impl CharacteristicFunction {
    pub fn from_runs(mut runs: Vec<(BigRational, BigUint)>) -> Self {
        runs.retain(|(_, c)| !c.is_zero());
        runs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(BigRational, BigUint)> = Vec::with_capacity(runs.len());
        for (v, c) in runs {
            match merged.last_mut() {
                Some((last, count)) if *last == v => *count += c,
                _ => merged.push((v, c)),
            }
        }
        CharacteristicFunction { breakpoints: merged }
    }

    pub fn of(x: &SchmidtVector) -> Self {
        Self::from_runs(x.elems.iter().map(|v| (v.clone(), BigUint::one())).collect())
    }

    /// Run-length form of `x ⊗ c`. `cap` bounds the number of `(x_i, c_ℓ)` pairs.
    pub fn of_tensor(x: &SchmidtVector, c: &Catalyst, cap: Option<u128>) -> Result<Self> {
        let xs = Self::of(x);
        let size = xs.breakpoints.len() as u128 * c.entries.len() as u128;
        if let Some(cap) = cap {
            if size > cap {
                return Err(Error::SizeCap { size, cap });
            }
        }
        let mut runs = Vec::with_capacity(size as usize);
        for (xv, xc) in &xs.breakpoints {
            for (cv, cm) in &c.entries {
                runs.push((xv * cv, xc * cm));
            }
        }
        Ok(Self::from_runs(runs))
    }

    pub fn breakpoints(&self) -> &[(BigRational, BigUint)] {
        &self.breakpoints
    }

    /// Number of elements (the slope above the largest breakpoint).
    pub fn count(&self) -> BigUint {
        self.breakpoints.iter().map(|(_, c)| c).sum()
    }

    pub fn total(&self) -> BigRational {
        self.breakpoints
            .iter()
            .fold(BigRational::zero(), |acc, (v, c)| acc + v * count_q(c))
    }

    pub fn eval(&self, t: &BigRational) -> Result<BigRational> {
        if t.is_negative() {
            return Err(Error::Domain(format!("H is defined for t >= 0, got {t}")));
        }
        Ok(self
            .breakpoints
            .iter()
            .take_while(|(v, _)| v < t)
            .fold(BigRational::zero(), |acc, (v, c)| acc + (t - v) * count_q(c)))
    }

    /// `self ≺^w other` via sorted partial sums evaluated at run boundaries.
    ///
    /// `F_m` is linear in `m` inside a run, so the difference of the two
    /// partial-sum functions only needs checking where either side changes run.
    pub fn is_supermajorized_by(&self, other: &CharacteristicFunction) -> Result<bool> {
        let n = self.count();
        if n != other.count() {
            return Err(Error::Shape {
                left: n.to_usize().unwrap_or(usize::MAX),
                right: other.count().to_usize().unwrap_or(usize::MAX),
            });
        }
        let mut a = PartialSums::new(&self.breakpoints);
        let mut b = PartialSums::new(&other.breakpoints);
        let mut boundaries: Vec<BigInt> = Vec::with_capacity(self.breakpoints.len() + other.breakpoints.len());
        let mut acc = BigInt::zero();
        for (_, c) in &self.breakpoints {
            acc += BigInt::from(c.clone());
            boundaries.push(acc.clone());
        }
        acc = BigInt::zero();
        for (_, c) in &other.breakpoints {
            acc += BigInt::from(c.clone());
            boundaries.push(acc.clone());
        }
        boundaries.sort();
        boundaries.dedup();
        for m in &boundaries {
            if a.at(m) < b.at(m) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `self ≺^w other` via pointwise dominance `H_self(t) <= H_other(t)`; an
    /// independent route kept for cross-checking.
    pub fn is_dominated_pointwise(&self, other: &CharacteristicFunction) -> Result<bool> {
        let n = self.count();
        if n != other.count() {
            return Err(Error::Shape {
                left: n.to_usize().unwrap_or(usize::MAX),
                right: other.count().to_usize().unwrap_or(usize::MAX),
            });
        }
        let mut ts: Vec<&BigRational> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .map(|(v, _)| v)
            .collect();
        ts.sort();
        ts.dedup();
        let mut ha = HCursor::new(&self.breakpoints);
        let mut hb = HCursor::new(&other.breakpoints);
        for t in ts {
            if ha.at(t) > hb.at(t) {
                return Ok(false);
            }
        }
        // Both slopes equal n above the last breakpoint; the offsets are -Σ.
        Ok(self.total() >= other.total())
    }
}

fn count_q(c: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(c.clone()))
}

struct PartialSums<'a> {
    runs: &'a [(BigRational, BigUint)],
    idx: usize,
    count_before: BigInt,
    sum_before: BigRational,
}

impl<'a> PartialSums<'a> {
    fn new(runs: &'a [(BigRational, BigUint)]) -> Self {
        PartialSums { runs, idx: 0, count_before: BigInt::zero(), sum_before: BigRational::zero() }
    }

    /// `F_m` for nondecreasing `m` across calls.
    fn at(&mut self, m: &BigInt) -> BigRational {
        while self.idx < self.runs.len() {
            let (v, c) = &self.runs[self.idx];
            let c = BigInt::from(c.clone());
            if &(&self.count_before + &c) >= m {
                break;
            }
            self.sum_before += v * BigRational::from_integer(c.clone());
            self.count_before += c;
            self.idx += 1;
        }
        match self.runs.get(self.idx) {
            Some((v, _)) => &self.sum_before + v * BigRational::from_integer(m - &self.count_before),
            None => self.sum_before.clone(),
        }
    }
}

struct HCursor<'a> {
    runs: &'a [(BigRational, BigUint)],
    idx: usize,
    count_below: BigRational,
    sum_below: BigRational,
}

impl<'a> HCursor<'a> {
    fn new(runs: &'a [(BigRational, BigUint)]) -> Self {
        HCursor { runs, idx: 0, count_below: BigRational::zero(), sum_below: BigRational::zero() }
    }

    /// `H(t)` for nondecreasing `t` across calls.
    fn at(&mut self, t: &BigRational) -> BigRational {
        while self.idx < self.runs.len() && &self.runs[self.idx].0 < t {
            let (v, c) = &self.runs[self.idx];
            let c = count_q(c);
            self.sum_below += v * &c;
            self.count_below += c;
            self.idx += 1;
        }
        &self.count_below * t - &self.sum_below
    }
}

fn check_same_len(x: &SchmidtVector, y: &SchmidtVector) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Shape { left: x.len(), right: y.len() });
    }
    Ok(())
}

/// `x↑`, the ascending arrangement of `x`.
pub fn sort_ascending(x: &SchmidtVector) -> SchmidtVector {
    x.sorted()
}

/// Sum of the `m` smallest elements.
pub fn f_m(x: &SchmidtVector, m: usize) -> Result<BigRational> {
    if m == 0 || m > x.len() {
        return Err(Error::Range { index: m, len: x.len() });
    }
    Ok(x.sorted().elems[..m].iter().fold(BigRational::zero(), |acc, v| acc + v))
}

/// All sorted partial sums `F_1..F_n`.
pub fn partial_sums(x: &SchmidtVector) -> Vec<BigRational> {
    let mut acc = BigRational::zero();
    x.sorted()
        .elems
        .iter()
        .map(|v| {
            acc += v;
            acc.clone()
        })
        .collect()
}

/// `x ≺^w y`: `F_m(x) >= F_m(y)` for every `m`.
pub fn supermajorizes(x: &SchmidtVector, y: &SchmidtVector) -> Result<bool> {
    check_same_len(x, y)?;
    Ok(partial_sums(x).iter().zip(partial_sums(y).iter()).all(|(a, b)| a >= b))
}

/// `x ≺ y`: super-majorization with equal sums.
pub fn majorizes(x: &SchmidtVector, y: &SchmidtVector) -> Result<bool> {
    Ok(supermajorizes(x, y)? && x.sum() == y.sum())
}

/// The flat product sequence `x ⊗ c`.
pub fn tensor(x: &SchmidtVector, c: &Catalyst) -> Result<SchmidtVector> {
    let flat = c.expand()?;
    let size = x.len() as u128 * flat.len() as u128;
    if size > TENSOR_EXPANSION_CAP {
        return Err(Error::SizeCap { size, cap: TENSOR_EXPANSION_CAP });
    }
    let mut elems = Vec::with_capacity(size as usize);
    for xi in &x.elems {
        for cl in &flat.elems {
            elems.push(xi * cl);
        }
    }
    Ok(SchmidtVector { elems })
}

/// `H_x(t) = Σ (t − x_i)^+`.
pub fn characteristic_eval(x: &SchmidtVector, t: &BigRational) -> Result<BigRational> {
    CharacteristicFunction::of(x).eval(t)
}

/// Removes values shared by `x` and `y`, each as many times as it occurs in both.
pub fn strip_common(x: &SchmidtVector, y: &SchmidtVector) -> Result<(SchmidtVector, SchmidtVector)> {
    check_same_len(x, y)?;
    let xs = x.sorted();
    let ys = y.sorted();
    if xs == ys {
        return Err(Error::Degenerate("x and y are permutations of each other".into()));
    }
    let (mut i, mut j) = (0, 0);
    let (mut xo, mut yo) = (Vec::new(), Vec::new());
    while i < xs.len() || j < ys.len() {
        let ord = match (xs.elems.get(i), ys.elems.get(j)) {
            (Some(a), Some(b)) => a.cmp(b),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => unreachable!(),
        };
        match ord {
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
            Ordering::Less => {
                xo.push(xs.elems[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                yo.push(ys.elems[j].clone());
                j += 1;
            }
        }
    }
    Ok((SchmidtVector::from_raw(xo), SchmidtVector::from_raw(yo)))
}

/// JSON-facing catalyst entry with exact string fields.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalystEntry {
    pub value: String,
    pub multiplicity: String,
}

impl Catalyst {
    pub fn to_entries(&self) -> Vec<CatalystEntry> {
        self.entries
            .iter()
            .map(|(v, m)| CatalystEntry { value: format_rational(v), multiplicity: m.to_string() })
            .collect()
    }

    pub fn from_entries(entries: &[CatalystEntry]) -> Result<Self> {
        let parsed = entries
            .iter()
            .map(|e| {
                let v = parse_rational(&e.value)?;
                let m = e
                    .multiplicity
                    .trim()
                    .parse::<BigUint>()
                    .map_err(|_| Error::Parse(e.multiplicity.clone()))?;
                Ok((v, m))
            })
            .collect::<Result<Vec<_>>>()?;
        Catalyst::new(parsed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(items: &[&str]) -> SchmidtVector {
        SchmidtVector::parse(items).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn sorting() {
        assert_eq!(sort_ascending(&v(&["3", "1", "2"])), v(&["1", "2", "3"]));
        assert_eq!(sort_ascending(&v(&["1", "1"])), v(&["1", "1"]));
        assert_eq!(sort_ascending(&v(&["1/2", "1/3", "1/6"])), v(&["1/6", "1/3", "1/2"]));
    }

    #[test]
    fn smallest_partial_sums() {
        assert_eq!(f_m(&v(&["3", "1", "2"]), 2).unwrap(), q(3, 1));
        let x = v(&["0.4", "0.4", "0.1", "0.1"]);
        assert_eq!(f_m(&x, 2).unwrap(), q(1, 5));
        assert_eq!(f_m(&x, 4).unwrap(), x.sum());
        assert_eq!(f_m(&x, 0), Err(Error::Range { index: 0, len: 4 }));
        assert!(f_m(&x, 5).is_err());
    }

    #[test]
    fn super_majorization_examples() {
        assert!(supermajorizes(&v(&["0.3", "0.7"]), &v(&["0.2", "0.8"])).unwrap());
        let x = v(&["0.4", "0.4", "0.1", "0.1"]);
        assert!(supermajorizes(&x, &x).unwrap());
        assert!(!supermajorizes(&x, &v(&["0.5", "0.25", "0.25", "0"])).unwrap());
        assert!(matches!(supermajorizes(&x, &v(&["1"])), Err(Error::Shape { .. })));
    }

    #[test]
    fn majorization_examples() {
        assert!(majorizes(&v(&["0.5", "0.5"]), &v(&["0.9", "0.1"])).unwrap());
        assert!(majorizes(&v(&["0.3", "0.7"]), &v(&["0.2", "0.8"])).unwrap());
        assert!(!majorizes(&v(&["2", "2"]), &v(&["1", "1"])).unwrap());
    }

    #[test]
    fn tensor_products() {
        let c = Catalyst::from_values(&[q(3, 1)]).unwrap();
        assert_eq!(tensor(&v(&["1", "2"]), &c).unwrap(), v(&["3", "6"]));
        let x = v(&["2", "2", "2", "8"]);
        let c = Catalyst::new(vec![
            (q(1, 1), BigUint::from(2u8)),
            (q(2, 1), BigUint::from(1u8)),
            (q(4, 1), BigUint::from(1u8)),
        ])
        .unwrap();
        let t = tensor(&x, &c).unwrap();
        assert_eq!(t.len(), 16);
        let h = CharacteristicFunction::of(&t);
        let expected: Vec<(BigRational, BigUint)> = [(2, 6u8), (4, 3), (8, 5), (16, 1), (32, 1)]
            .iter()
            .map(|&(a, b)| (q(a, 1), BigUint::from(b)))
            .collect();
        assert_eq!(h.breakpoints(), expected.as_slice());
        assert_eq!(CharacteristicFunction::of_tensor(&x, &c, None).unwrap(), h);
        assert_eq!(tensor(&x, &Catalyst::trivial()).unwrap(), x);
    }

    #[test]
    fn characteristic_function_values() {
        assert_eq!(characteristic_eval(&v(&["1", "2"]), &q(0, 1)).unwrap(), q(0, 1));
        assert_eq!(characteristic_eval(&v(&["1", "2"]), &q(3, 1)).unwrap(), q(3, 1));
        assert_eq!(characteristic_eval(&v(&["1", "1", "4", "4"]), &q(2, 1)).unwrap(), q(2, 1));
        assert!(characteristic_eval(&v(&["1"]), &q(-1, 2)).is_err());
    }

    #[test]
    fn stripping_common_values() {
        let (a, b) = strip_common(&v(&["0.5", "0.3", "0.2"]), &v(&["0.7", "0.3", "0"])).unwrap();
        assert_eq!(a, v(&["0.2", "0.5"]));
        assert_eq!(b.elems(), &[q(0, 1), q(7, 10)]);
        let (a, b) = strip_common(&v(&["1", "2"]), &v(&["3", "4"])).unwrap();
        assert_eq!((a, b), (v(&["1", "2"]), v(&["3", "4"])));
        let (a, b) = strip_common(&v(&["1", "1", "2"]), &v(&["1", "3", "4"])).unwrap();
        assert_eq!((a, b), (v(&["1", "2"]), v(&["3", "4"])));
        assert!(matches!(
            strip_common(&v(&["1", "2"]), &v(&["2", "1"])),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn invalid_sequences() {
        assert!(SchmidtVector::parse::<&str>(&[]).is_err());
        assert!(SchmidtVector::parse(&["-1", "2"]).is_err());
        assert!(SchmidtVector::parse(&["0", "0"]).is_err());
        assert!(Catalyst::parse(&["0"]).is_err());
        assert!(Catalyst::new(vec![(q(1, 1), BigUint::zero())]).is_err());
    }

    #[test]
    fn run_length_predicates_match_flat_check() {
        let x = v(&["0.4", "0.4", "0.1", "0.1"]);
        let y = v(&["0.5", "0.25", "0.25", "0"]);
        let c = Catalyst::parse(&["0.6", "0.4"]).unwrap();
        let hx = CharacteristicFunction::of_tensor(&x, &c, None).unwrap();
        let hy = CharacteristicFunction::of_tensor(&y, &c, None).unwrap();
        assert!(hx.is_supermajorized_by(&hy).unwrap());
        assert!(hx.is_dominated_pointwise(&hy).unwrap());
        assert!(supermajorizes(&tensor(&x, &c).unwrap(), &tensor(&y, &c).unwrap()).unwrap());
        let hx1 = CharacteristicFunction::of(&x);
        let hy1 = CharacteristicFunction::of(&y);
        assert!(!hx1.is_supermajorized_by(&hy1).unwrap());
        assert!(!hx1.is_dominated_pointwise(&hy1).unwrap());
    }

    #[test]
    fn catalyst_entries_round_trip() {
        let c = Catalyst::new(vec![(q(3, 5), BigUint::from(7u8)), (q(2, 1), BigUint::from(1u8))]).unwrap();
        let e = c.to_entries();
        assert_eq!(e[0].value, "3/5");
        assert_eq!(Catalyst::from_entries(&e).unwrap(), c);
        assert_eq!(c.dimension(), BigUint::from(8u8));
    }
}
