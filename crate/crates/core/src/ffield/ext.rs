//! Extension fields, point counts by enumeration and the moment statistic.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polyarith::MPoly;

use super::poly::FpPoly;
use super::{is_prime, reduce, ReducedPoly};

const TABLE_LIMIT: u64 = 1024;

/// `F_{p^j}` as `F_p[x]/(m)` with `m` the first monic irreducible polynomial of degree `j`
/// in lexicographic order. Elements are encoded as integers `sum c_i p^i` in `[0, p^j)`.
#[derive(Clone, Debug)]
pub struct ExtField {
    p: u64,
    j: u32,
    q: u64,
    modulus: FpPoly,
    mul_table: Option<Vec<u32>>,
}

/// No common factor with `x^(p^i) - x` for `1 <= i < j`.
fn is_irreducible(m: &FpPoly, j: u32) -> bool {
    let p = m.characteristic();
    let x = FpPoly::x(p);
    let mut xp = x.clone();
    for _ in 1..j {
        xp = xp.pow_mod(p as u128, m);
        if m.gcd(&xp.sub(&x)).degree() != Some(0) {
            return false;
        }
    }
    true
}

impl ExtField {
    pub fn new(p: u64, j: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        if j == 0 {
            return Err(Error::domain("extension degree must be positive"));
        }
        let q = p
            .checked_pow(j)
            .filter(|&q| q < 1 << 32)
            .ok_or_else(|| Error::domain("field order must be below 2^32"))?;
        let modulus = (0..q)
            .map(|idx| {
                let mut c = digits(idx, p, j as usize);
                c.push(1);
                FpPoly::new(c, p)
            })
            .find(|m| is_irreducible(m, j))
            .ok_or_else(|| Error::invariant("no irreducible polynomial found"))?;
        let mut field = ExtField {
            p,
            j,
            q,
            modulus,
            mul_table: None,
        };
        if q <= TABLE_LIMIT {
            let t: Vec<u32> = (0..q * q)
                .map(|ab| field.mul_slow(ab / q, ab % q) as u32)
                .collect();
            field.mul_table = Some(t);
        }
        Ok(field)
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.j
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &FpPoly {
        &self.modulus
    }

    fn encode(&self, c: &[u64]) -> u64 {
        c.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (da, db) = (digits(a, self.p, self.j as usize), digits(b, self.p, self.j as usize));
        let s: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.encode(&s)
    }

    pub fn neg(&self, a: u64) -> u64 {
        let d: Vec<u64> = digits(a, self.p, self.j as usize)
            .iter()
            .map(|&x| (self.p - x) % self.p)
            .collect();
        self.encode(&d)
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    fn mul_slow(&self, a: u64, b: u64) -> u64 {
        let fa = FpPoly::new(digits(a, self.p, self.j as usize), self.p);
        let fb = FpPoly::new(digits(b, self.p, self.j as usize), self.p);
        let r = fa.mul(&fb).rem(&self.modulus);
        let mut c = r.coeffs().to_vec();
        c.resize(self.j as usize, 0);
        self.encode(&c)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        match &self.mul_table {
            Some(t) => t[(a * self.q + b) as usize] as u64,
            None => self.mul_slow(a, b),
        }
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// The image of a prime-field residue.
    pub fn from_base(&self, c: u64) -> u64 {
        c % self.p
    }

    /// Value of an integer polynomial at a point of `F_{p^j}^n`.
    pub fn eval(&self, f: &MPoly, pt: &[u64]) -> u64 {
        let mut acc = 0;
        for (e, c) in f.terms() {
            let mut t = self.from_base(reduce(c, self.p));
            for (k, &x) in e.iter().enumerate() {
                if x > 0 {
                    t = self.mul(t, self.pow(pt[k], x as u64));
                }
            }
            acc = self.add(acc, t);
        }
        acc
    }
}

fn digits(mut a: u64, p: u64, n: usize) -> Vec<u64> {
    let mut v = Vec::with_capacity(n);
    for _ in 0..n {
        v.push(a % p);
        a /= p;
    }
    v
}

/// Table `N_j(tau)` for every `tau` together with the centered second moment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentReport {
    pub field_order: u64,
    pub counts: Vec<u64>,
    pub expected: f64,
    pub moment: f64,
}

/// For `x` ranging over `F_{p^j}^n` with every `g` vanishing, tallies `F(x)`, and returns
/// the table and `sum_tau |N_j(tau) - expected|^2`.
pub fn moment_statistic(
    field: &ExtField,
    f: &MPoly,
    constraints: &[MPoly],
    expected: f64,
    max_points: u128,
) -> Result<MomentReport> {
    let n = f.nvars();
    let q = field.order();
    let total = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > max_points {
        return Err(Error::Budget(format!("{total} points to enumerate")));
    }
    let mut counts = vec![0u64; q as usize];
    let mut pt = vec![0u64; n];
    for idx in 0..total {
        let mut r = idx;
        for c in pt.iter_mut() {
            *c = (r % q as u128) as u64;
            r /= q as u128;
        }
        if constraints.iter().all(|g| field.eval(g, &pt) == 0) {
            counts[field.eval(f, &pt) as usize] += 1;
        }
    }
    let moment = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d
        })
        .sum();
    Ok(MomentReport {
        field_order: q,
        counts,
        expected,
        moment,
    })
}

fn common_zeros(fs: &[MPoly], p: u64) -> Result<u64> {
    let n = fs.first().map(|f| f.nvars()).ok_or_else(|| Error::domain("no equations"))?;
    if fs.iter().any(|f| f.nvars() != n) {
        return Err(Error::domain("equations use different variable lists"));
    }
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    let reduced: Vec<ReducedPoly> = fs.iter().map(|f| ReducedPoly::new(f, p)).collect();
    if n == 0 {
        return Ok(u64::from(reduced.iter().all(|r| r.is_zero())));
    }
    let rest = (p as u128).pow(n as u32 - 1);
    Ok((0..p)
        .into_par_iter()
        .map(|x0| {
            let mut pt = vec![0u64; n];
            pt[0] = x0;
            let mut c = 0u64;
            for idx in 0..rest {
                let mut r = idx;
                for v in pt.iter_mut().skip(1) {
                    *v = (r % p as u128) as u64;
                    r /= p as u128;
                }
                if reduced.iter().all(|f| f.eval(&pt) == 0) {
                    c += 1;
                }
            }
            c
        })
        .sum())
}

/// `#{x in F_p^n : f(x) = 0 for every f}`.
pub fn affine_point_count(fs: &[MPoly], p: u64) -> Result<u64> {
    common_zeros(fs, p)
}

/// Points of the affine cone over the projective variety cut out by homogeneous forms,
/// origin included.
pub fn cone_point_count(forms: &[MPoly], p: u64) -> Result<u64> {
    if forms.iter().any(|f| !f.is_homogeneous()) {
        return Err(Error::domain("cone counts need homogeneous forms"));
    }
    common_zeros(forms, p)
}

/// `(c_t, d_t)`: the number of set partitions of `t` labelled positions into two and three
/// blocks, found by enumerating `t`-tuples over a `t`-element alphabet and dividing the
/// number of tuples with exactly 2 (resp. 3) distinct entries by the number of ordered
/// choices of those entries.
pub fn tuple_pattern_constants(t: u32) -> (u64, u64) {
    let v = t.max(3) as u64;
    let mut two = 0u64;
    let mut three = 0u64;
    for idx in 0..v.pow(t) {
        let tuple = digits(idx, v, t as usize);
        let mut seen = tuple.clone();
        seen.sort_unstable();
        seen.dedup();
        match seen.len() {
            2 => two += 1,
            3 => three += 1,
            _ => {}
        }
    }
    (two / (v * (v - 1)), three / (v * (v - 1) * (v - 2)))
}
