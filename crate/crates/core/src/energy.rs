//! Exact counts of solutions of `f(x1)+f(x2) = f(x3)+f(x4)+k` and of
//! `f(x1,x2) = (a x3 - b x4) g(x3,x4) + k` in the box `{1..B}^4`, and of
//! integer points on plane curves in `{1..B}^2`.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{fit_exponent, FitResult};
use crate::polyarith::{integer_roots_in, IntPoly1, MPoly};

/// Explicit resource limits; exceeding one is an error, never a truncation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Budget {
    /// Largest number of quadruples a brute-force count may enumerate.
    pub max_quadruples: u128,
    /// Largest number of stored pair values.
    pub max_pairs: usize,
    /// Wall-clock limit in milliseconds.
    pub max_millis: Option<u64>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_quadruples: 1 << 32,
            max_pairs: 1 << 26,
            max_millis: None,
        }
    }
}

impl Budget {
    fn check_time(&self, start: &Instant) -> Result<()> {
        if let Some(ms) = self.max_millis {
            if start.elapsed().as_millis() as u64 > ms {
                return Err(Error::Budget(format!("wall time over {ms} ms")));
            }
        }
        Ok(())
    }

    fn check_pairs(&self, n: u128) -> Result<()> {
        if n > self.max_pairs as u128 {
            return Err(Error::Budget(format!(
                "{n} pair values exceed the limit of {}",
                self.max_pairs
            )));
        }
        Ok(())
    }
}

/// `E_f(B;k)`: a univariate polynomial of degree at least 3, a shift and a box size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnergyInstance {
    pub f: IntPoly1,
    pub k: BigInt,
    pub b: u64,
}

impl EnergyInstance {
    pub fn new(f: IntPoly1, k: BigInt, b: u64) -> Result<Self> {
        if f.degree().unwrap_or(0) < 3 {
            return Err(Error::domain("energy instances need degree at least 3"));
        }
        if b == 0 {
            return Err(Error::domain("box size must be positive"));
        }
        Ok(EnergyInstance { f, k, b })
    }
}

/// `M_{f,g}(B;k)` for `f(x1,x2) = (a x3 - b x4) g(x3,x4) + k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralInstance {
    pub f: MPoly,
    pub g: MPoly,
    pub a: BigInt,
    pub b: BigInt,
    pub k: BigInt,
    pub bound: u64,
}

impl GeneralInstance {
    pub fn new(f: MPoly, g: MPoly, a: BigInt, b: BigInt, k: BigInt, bound: u64) -> Result<Self> {
        if f.nvars() != 2 || g.nvars() != 2 {
            return Err(Error::domain("f and g must be bivariate"));
        }
        let d = f.total_degree().unwrap_or(0);
        if !f.coeff(&[0, 0]).is_zero() {
            return Err(Error::domain("f must have zero constant term"));
        }
        if g.total_degree().map(|e| e + 1) != Some(d) {
            return Err(Error::domain("deg g must equal deg f - 1"));
        }
        if a.is_zero() || b.is_zero() || k.is_zero() {
            return Err(Error::domain("a, b and k must be nonzero"));
        }
        if bound == 0 {
            return Err(Error::domain("box size must be positive"));
        }
        Ok(GeneralInstance { f, g, a, b, k, bound })
    }

    /// `d = deg f`.
    pub fn degree(&self) -> u32 {
        self.f.total_degree().unwrap_or(0)
    }

    /// The instance obtained from `f = p(x) - p(y)`, `g` its cofactor, `a = b = 1`.
    pub fn from_energy(p: &IntPoly1, k: BigInt, bound: u64) -> Result<Self> {
        let f = crate::polyarith::difference_poly(p);
        let g = crate::polyarith::difference_cofactor(p);
        Self::new(f, g, BigInt::from(1), BigInt::from(1), k, bound)
    }

    /// `G(x3, x4) = (a x3 - b x4) g(x3, x4)`.
    pub fn right_side(&self) -> MPoly {
        let lin = MPoly::from_terms(
            &["x", "y"],
            [(vec![1, 0], self.a.clone()), (vec![0, 1], -self.b.clone())],
        );
        &lin * &self.g.rename(&["x", "y"])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    BruteForce,
    MeetInTheMiddle,
    Histogram,
    CurveScan,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountResult {
    #[serde(serialize_with = "crate::energy::ser_biguint")]
    pub count: BigUint,
    pub algo: Algorithm,
    pub millis: u128,
}

pub(crate) fn ser_biguint<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Values stored in machine words when they provably fit, else as big integers.
enum Values {
    Small(Vec<i128>),
    Big(Vec<BigInt>),
}

/// Headroom so that sums of two values and a shift stay inside `i128`.
const SMALL_LIMIT_BITS: u64 = 120;

fn fits(v: &BigInt) -> bool {
    v.bits() <= SMALL_LIMIT_BITS
}

fn pack(vals: Vec<BigInt>, k: &BigInt) -> Values {
    if fits(k) && vals.iter().all(fits) {
        Values::Small(vals.iter().map(|v| v.to_i128().unwrap()).collect())
    } else {
        Values::Big(vals)
    }
}

fn uni_values(f: &IntPoly1, b: u64) -> Vec<BigInt> {
    (1..=b).map(|x| f.eval(&BigInt::from(x))).collect()
}

/// Values of a bivariate polynomial on `{1..B}^2`, row-major in the first variable.
fn grid_values(p: &MPoly, b: u64) -> Vec<BigInt> {
    (1..=b)
        .into_par_iter()
        .flat_map_iter(|x| {
            let s = p.slice(1, &[BigInt::from(x), BigInt::zero()]);
            (1..=b).map(move |y| s.eval(&BigInt::from(y)))
        })
        .collect()
}

/// Exact count by enumerating all quadruples.
pub fn energy_bruteforce(inst: &EnergyInstance, budget: &Budget) -> Result<CountResult> {
    let start = Instant::now();
    let b = inst.b as u128;
    if b.pow(4) > budget.max_quadruples {
        return Err(Error::Budget(format!("{} quadruples", b.pow(4))));
    }
    let vals = uni_values(&inst.f, inst.b);
    let mut count: u128 = 0;
    match pack(vals, &inst.k) {
        Values::Small(v) => {
            let k = inst.k.to_i128().unwrap();
            for &v1 in &v {
                budget.check_time(&start)?;
                for &v2 in &v {
                    for &v3 in &v {
                        for &v4 in &v {
                            if v1 + v2 == v3 + v4 + k {
                                count += 1;
                            }
                        }
                    }
                }
            }
        }
        Values::Big(v) => {
            for v1 in &v {
                budget.check_time(&start)?;
                for v2 in &v {
                    let l = v1 + v2 - &inst.k;
                    for v3 in &v {
                        for v4 in &v {
                            if l == v3 + v4 {
                                count += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(CountResult {
        count: BigUint::from(count),
        algo: Algorithm::BruteForce,
        millis: start.elapsed().as_millis(),
    })
}

/// Run-length encoding of a sorted slice.
fn runs<T: PartialEq + Clone>(sorted: &[T]) -> Vec<(T, u128)> {
    let mut out: Vec<(T, u128)> = Vec::new();
    for v in sorted {
        match out.last_mut() {
            Some((w, c)) if w == v => *c += 1,
            _ => out.push((v.clone(), 1)),
        }
    }
    out
}

/// Smallest index `i >= from` with `keys[i] >= target`, by exponential then binary search.
fn gallop<T: Ord>(keys: &[(T, u128)], from: usize, target: &T) -> usize {
    let n = keys.len();
    if from >= n || keys[from].0 >= *target {
        return from;
    }
    let mut step = 1;
    let mut lo = from;
    let mut hi = from + 1;
    while hi < n && keys[hi].0 < *target {
        lo = hi;
        step *= 2;
        hi = (hi + step).min(n);
    }
    // keys[lo] < target, answer in (lo, hi]
    let (mut l, mut r) = (lo + 1, hi.min(n));
    while l < r {
        let mid = (l + r) / 2;
        if keys[mid].0 < *target {
            l = mid + 1;
        } else {
            r = mid;
        }
    }
    l
}

/// `sum over values v of mult_left(v) * mult_right(v - k)` for run-length lists.
fn offset_matches<T, F>(left: &[(T, u128)], right: &[(T, u128)], shift: F) -> u128
where
    T: Ord,
    F: Fn(&T) -> T,
{
    // right values shifted by k must be matched against left values
    let mut count = 0u128;
    let mut i = 0;
    for (w, cw) in right {
        let target = shift(w);
        i = gallop(left, i, &target);
        if i >= left.len() {
            break;
        }
        if left[i].0 == target {
            count += left[i].1 * cw;
        }
    }
    count
}

fn pair_sums_small(v: &[i128]) -> Vec<i128> {
    let mut s: Vec<i128> = v
        .par_iter()
        .flat_map_iter(|&a| v.iter().map(move |&b| a + b))
        .collect();
    s.par_sort_unstable();
    s
}

fn pair_sums_big(v: &[BigInt]) -> Vec<BigInt> {
    let mut s: Vec<BigInt> = v
        .par_iter()
        .flat_map_iter(|a| v.iter().map(move |b| a + b))
        .collect();
    s.par_sort_unstable();
    s
}

/// Exact count from the sorted multiset of pair sums, `O(B^2 log B)`.
pub fn energy_mitm(inst: &EnergyInstance, budget: &Budget) -> Result<CountResult> {
    let start = Instant::now();
    budget.check_pairs((inst.b as u128).pow(2))?;
    let vals = uni_values(&inst.f, inst.b);
    let count = match pack(vals, &inst.k) {
        Values::Small(v) => {
            let k = inst.k.to_i128().unwrap();
            let r = runs(&pair_sums_small(&v));
            offset_matches(&r, &r, |w| w + k)
        }
        Values::Big(v) => {
            let r = runs(&pair_sums_big(&v));
            offset_matches(&r, &r, |w| w + &inst.k)
        }
    };
    budget.check_time(&start)?;
    Ok(CountResult {
        count: BigUint::from(count),
        algo: Algorithm::MeetInTheMiddle,
        millis: start.elapsed().as_millis(),
    })
}

/// The full map `k -> E_f(B;k)` for every `k` with a nonzero count, from one sort.
pub fn energy_histogram(f: &IntPoly1, b: u64, budget: &Budget) -> Result<BTreeMap<BigInt, BigUint>> {
    budget.check_pairs((b as u128).pow(2))?;
    let vals = uni_values(f, b);
    let mut out: BTreeMap<BigInt, BigUint> = BTreeMap::new();
    match pack(vals, &BigInt::zero()) {
        Values::Small(v) => {
            let r = runs(&pair_sums_small(&v));
            let partial: Vec<BTreeMap<i128, u128>> = r
                .par_iter()
                .map(|(u, cu)| {
                    let mut m = BTreeMap::new();
                    for (w, cw) in &r {
                        *m.entry(u - w).or_insert(0) += cu * cw;
                    }
                    m
                })
                .collect();
            let mut merged: BTreeMap<i128, u128> = BTreeMap::new();
            for m in partial {
                for (k, c) in m {
                    *merged.entry(k).or_insert(0) += c;
                }
            }
            for (k, c) in merged {
                out.insert(BigInt::from(k), BigUint::from(c));
            }
        }
        Values::Big(v) => {
            let r = runs(&pair_sums_big(&v));
            let mut merged: BTreeMap<BigInt, u128> = BTreeMap::new();
            for (u, cu) in &r {
                for (w, cw) in &r {
                    *merged.entry(u - w).or_insert(0) += cu * cw;
                }
            }
            for (k, c) in merged {
                out.insert(k, BigUint::from(c));
            }
        }
    }
    Ok(out)
}

/// Exact count of solutions of `f(x1,x2) = (a x3 - b x4) g(x3,x4) + k` in the box.
pub fn general_count(inst: &GeneralInstance, budget: &Budget) -> Result<CountResult> {
    let start = Instant::now();
    budget.check_pairs(2 * (inst.bound as u128).pow(2))?;
    let left = grid_values(&inst.f, inst.bound);
    let right = grid_values(&inst.right_side(), inst.bound);
    let k = &inst.k;
    let count = if fits(k) && left.iter().all(fits) && right.iter().all(fits) {
        let kk = k.to_i128().unwrap();
        let mut l: Vec<i128> = left.iter().map(|v| v.to_i128().unwrap()).collect();
        let mut r: Vec<i128> = right.iter().map(|v| v.to_i128().unwrap()).collect();
        l.par_sort_unstable();
        r.par_sort_unstable();
        offset_matches(&runs(&l), &runs(&r), |w| w + kk)
    } else {
        let mut l = left;
        let mut r = right;
        l.par_sort_unstable();
        r.par_sort_unstable();
        offset_matches(&runs(&l), &runs(&r), |w| w + k)
    };
    budget.check_time(&start)?;
    Ok(CountResult {
        count: BigUint::from(count),
        algo: Algorithm::MeetInTheMiddle,
        millis: start.elapsed().as_millis(),
    })
}

/// Brute-force version of [`general_count`] (quadruple enumeration).
pub fn general_count_bruteforce(inst: &GeneralInstance, budget: &Budget) -> Result<CountResult> {
    let start = Instant::now();
    let n = inst.bound as u128;
    if n.pow(4) > budget.max_quadruples {
        return Err(Error::Budget(format!("{} quadruples", n.pow(4))));
    }
    let left = grid_values(&inst.f, inst.bound);
    let right = grid_values(&inst.right_side(), inst.bound);
    let mut count = 0u128;
    for l in &left {
        budget.check_time(&start)?;
        for r in &right {
            if *l == r + &inst.k {
                count += 1;
            }
        }
    }
    Ok(CountResult {
        count: BigUint::from(count),
        algo: Algorithm::BruteForce,
        millis: start.elapsed().as_millis(),
    })
}

/// Number of `(x, y)` in `{1..B}^2` with `F(x, y) = l`.
pub fn curve_count_in_box(f: &MPoly, l: &BigInt, b: u64) -> Result<CountResult> {
    let start = Instant::now();
    if f.nvars() != 2 {
        return Err(Error::domain("curve counts need a bivariate polynomial"));
    }
    if f.total_degree().unwrap_or(0) == 0 {
        return Err(Error::domain("F is constant"));
    }
    let lo = BigInt::from(1);
    let hi = BigInt::from(b);
    let count: u128 = (1..=b)
        .into_par_iter()
        .map(|x| {
            let s = f.slice(1, &[BigInt::from(x), BigInt::zero()]);
            let s = &s - &IntPoly1::constant(l.clone(), s.var());
            match integer_roots_in(&s, &lo, &hi) {
                None => b as u128,
                Some(r) => r.len() as u128,
            }
        })
        .sum();
    Ok(CountResult {
        count: BigUint::from(count),
        algo: Algorithm::CurveScan,
        millis: start.elapsed().as_millis(),
    })
}

/// Counts over a list of box sizes with the fitted growth exponent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanResult {
    pub points: Vec<(u64, String)>,
    pub fit: FitResult,
}

/// Runs `counter` for every `B` in `bs` (at least three, strictly increasing) and fits
/// the slope of `log count` against `log B`.
pub fn exponent_scan<F>(bs: &[u64], counter: F) -> Result<ScanResult>
where
    F: Fn(u64) -> Result<CountResult>,
{
    if bs.len() < 3 {
        return Err(Error::domain("need at least three box sizes"));
    }
    if bs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("box sizes must be strictly increasing"));
    }
    let mut pairs = Vec::with_capacity(bs.len());
    for &b in bs {
        pairs.push((b, counter(b)?.count));
    }
    let fit = fit_exponent(&pairs)?;
    Ok(ScanResult {
        points: pairs.into_iter().map(|(b, c)| (b, c.to_string())).collect(),
        fit,
    })
}

/// `2B^2 - B`, the number of distinct tuples `(a,b,a,b)` and `(a,b,b,a)`.
pub fn diagonal_count(b: u64) -> BigUint {
    let b = BigUint::from(b);
    &b * &b * 2u32 - &b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gallop_finds_lower_bound() {
        let keys: Vec<(i64, u128)> = (0..50).map(|i| (2 * i, 1)).collect();
        for from in 0..50 {
            for t in -1..102 {
                let want = (from..50).find(|&i| keys[i].0 >= t).unwrap_or(50);
                assert_eq!(gallop(&keys, from, &t), want);
            }
        }
    }
}
