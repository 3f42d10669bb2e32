//! Exact integer roots of integer polynomials inside an interval.
//!
//! The integer sequence `p(lo), ..., p(hi)` is split into monotone runs using the
//! forward difference `p(t+1) - p(t)`, itself handled recursively; each run is
//! searched by bisection.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::uni::IntPoly1;

fn forward_difference(p: &IntPoly1) -> IntPoly1 {
    &p.shift(&BigInt::one()) - p
}

/// Runs `[a, b]` covering `[lo, hi]` on which `p(a), ..., p(b)` is monotone.
fn monotone_runs(p: &IntPoly1, lo: &BigInt, hi: &BigInt) -> Vec<(BigInt, BigInt)> {
    if p.degree().unwrap_or(0) <= 1 || lo >= hi {
        return vec![(lo.clone(), hi.clone())];
    }
    let q = forward_difference(p);
    let mut out = Vec::new();
    for (a, b) in monotone_runs(&q, lo, &(hi - 1)) {
        // q is monotone on a..=b; p is monotone on a..=b+1 unless q changes sign
        let qa = q.eval(&a).signum();
        let qb = q.eval(&b).signum();
        if qa.is_zero() || qb.is_zero() || qa == qb {
            out.push((a, &b + 1));
            continue;
        }
        // first s in [a, b] whose sign matches q(b)
        let (mut l, mut r) = (a.clone(), b.clone());
        while l < r {
            let mid: BigInt = (&l + &r) >> 1;
            if q.eval(&mid).signum() == qb {
                r = mid;
            } else {
                l = mid + 1;
            }
        }
        out.push((a, l.clone()));
        out.push((l, &b + 1));
    }
    out
}

/// Intervals shorter than this are scanned point by point.
const DIRECT_SCAN: u32 = 2048;

/// All integers `t` in `[lo, hi]` with `p(t) = 0`. The zero polynomial is rejected
/// by returning `None`.
pub fn integer_roots_in(p: &IntPoly1, lo: &BigInt, hi: &BigInt) -> Option<Vec<BigInt>> {
    if p.is_zero() {
        return None;
    }
    if lo > hi || p.degree() == Some(0) {
        return Some(Vec::new());
    }
    if hi - lo < BigInt::from(DIRECT_SCAN) {
        let mut out = Vec::new();
        let mut t = lo.clone();
        while &t <= hi {
            if p.eval(&t).is_zero() {
                out.push(t.clone());
            }
            t += 1;
        }
        return Some(out);
    }
    let mut roots = BTreeSet::new();
    for (a, b) in monotone_runs(p, lo, hi) {
        let pa = p.eval(&a);
        let pb = p.eval(&b);
        let increasing = pa <= pb;
        if (increasing && (pa.is_positive() || pb.is_negative()))
            || (!increasing && (pa.is_negative() || pb.is_positive()))
        {
            continue;
        }
        // first index where the run reaches zero from its starting side
        let (mut l, mut r) = (a.clone(), b.clone());
        while l < r {
            let mid: BigInt = (&l + &r) >> 1;
            let v = p.eval(&mid);
            let reached = if increasing { !v.is_negative() } else { !v.is_positive() };
            if reached {
                r = mid;
            } else {
                l = mid + 1;
            }
        }
        let mut t = l;
        while t <= b && p.eval(&t).is_zero() {
            roots.insert(t.clone());
            t += 1;
        }
    }
    Some(roots.into_iter().collect())
}

/// Bound on the absolute value of every root: `1 + max |a_i|`.
pub fn root_bound(p: &IntPoly1) -> BigInt {
    let m = p.coeffs().iter().map(|c| c.abs()).max().unwrap_or_default();
    m + 1
}

/// Every integer root of a nonzero polynomial.
pub fn integer_roots(p: &IntPoly1) -> Option<Vec<BigInt>> {
    let b = root_bound(p);
    integer_roots_in(p, &-b.clone(), &b)
}
