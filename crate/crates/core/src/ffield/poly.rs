//! Dense univariate polynomials over a prime field and root counting.

use crate::error::{Error, Result};
use crate::polyarith::IntPoly1;

use super::{inv_mod, is_prime, mul_mod};

/// Below this characteristic roots are counted by scanning every residue.
pub const SCAN_LIMIT: u64 = 1 << 14;

/// Polynomial over `F_p`, coefficients in `[0, p)`, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPoly {
    p: u64,
    c: Vec<u64>,
}

impl FpPoly {
    pub fn new(mut c: Vec<u64>, p: u64) -> Self {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { p, c }
    }

    pub fn from_int(f: &IntPoly1, p: u64) -> Self {
        Self::new(f.reduce_mod(p), p)
    }

    pub fn x(p: u64) -> Self {
        Self::new(vec![0, 1], p)
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.c
            .iter()
            .rev()
            .fold(0, |acc, &a| (mul_mod(acc, x, self.p) + a) % self.p)
    }

    pub fn add(&self, o: &FpPoly) -> FpPoly {
        let n = self.c.len().max(o.c.len());
        let v = (0..n)
            .map(|i| {
                let a = self.c.get(i).copied().unwrap_or(0);
                let b = o.c.get(i).copied().unwrap_or(0);
                (a + b) % self.p
            })
            .collect();
        FpPoly::new(v, self.p)
    }

    pub fn sub(&self, o: &FpPoly) -> FpPoly {
        let n = self.c.len().max(o.c.len());
        let v = (0..n)
            .map(|i| {
                let a = self.c.get(i).copied().unwrap_or(0);
                let b = o.c.get(i).copied().unwrap_or(0);
                (a + self.p - b) % self.p
            })
            .collect();
        FpPoly::new(v, self.p)
    }

    pub fn mul(&self, o: &FpPoly) -> FpPoly {
        if self.is_zero() || o.is_zero() {
            return FpPoly::new(vec![], self.p);
        }
        let mut v = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            for (j, &b) in o.c.iter().enumerate() {
                v[i + j] = (v[i + j] + mul_mod(a, b, self.p)) % self.p;
            }
        }
        FpPoly::new(v, self.p)
    }

    /// Remainder modulo a nonzero polynomial.
    pub fn rem(&self, d: &FpPoly) -> FpPoly {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = inv_mod(d.c[dd] as i128, self.p).expect("leading coefficient invertible");
        let mut r = self.c.clone();
        while r.len() > dd {
            let top = r.len() - 1;
            let q = mul_mod(r[top], inv, self.p);
            if q != 0 {
                for (j, &b) in d.c.iter().enumerate() {
                    let idx = top - dd + j;
                    r[idx] = (r[idx] + self.p - mul_mod(q, b, self.p)) % self.p;
                }
            }
            r.pop();
            while r.last() == Some(&0) {
                r.pop();
            }
        }
        FpPoly::new(r, self.p)
    }

    /// Quotient of the division by a nonzero polynomial.
    pub fn quo(&self, d: &FpPoly) -> FpPoly {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = inv_mod(d.c[dd] as i128, self.p).expect("leading coefficient invertible");
        let mut r = self.c.clone();
        if r.len() <= dd {
            return FpPoly::new(vec![], self.p);
        }
        let mut q = vec![0u64; r.len() - dd];
        for top in (dd..r.len()).rev() {
            let t = mul_mod(r[top], inv, self.p);
            q[top - dd] = t;
            if t != 0 {
                for (j, &b) in d.c.iter().enumerate() {
                    let idx = top - dd + j;
                    r[idx] = (r[idx] + self.p - mul_mod(t, b, self.p)) % self.p;
                }
            }
        }
        FpPoly::new(q, self.p)
    }

    pub fn gcd(&self, o: &FpPoly) -> FpPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> FpPoly {
        match self.c.last() {
            None => self.clone(),
            Some(&l) => {
                let inv = inv_mod(l as i128, self.p).unwrap();
                FpPoly::new(self.c.iter().map(|&a| mul_mod(a, inv, self.p)).collect(), self.p)
            }
        }
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, mut e: u128, m: &FpPoly) -> FpPoly {
        let mut base = self.rem(m);
        let mut acc = FpPoly::new(vec![1], self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }
}

/// Distinct roots in `F_p` by evaluating at every residue.
pub fn count_roots_scan(f: &FpPoly) -> u64 {
    if f.is_zero() {
        return f.p;
    }
    (0..f.p).filter(|&x| f.eval(x) == 0).count() as u64
}

/// Distinct roots in `F_p` as `deg gcd(f, x^p - x)`.
pub fn count_roots_gcd(f: &FpPoly) -> u64 {
    if f.is_zero() {
        return f.p;
    }
    if f.degree() == Some(0) {
        return 0;
    }
    let x = FpPoly::x(f.p);
    let xp = x.pow_mod(f.p as u128, f);
    let g = f.gcd(&xp.sub(&x));
    g.degree().unwrap_or(0) as u64
}

const SPLIT_FROM: u64 = 256;

/// Distinct roots in `F_p`, ascending. Scans below 256, otherwise splits
/// `gcd(f, x^p - x)` by Cantor-Zassenhaus with the shifts `x + a`, `a = 0, 1, ...`.
pub fn roots_mod_p(f: &FpPoly) -> Vec<u64> {
    assert!(!f.is_zero(), "the zero polynomial has every residue as a root");
    if f.p < SPLIT_FROM {
        return (0..f.p).filter(|&x| f.eval(x) == 0).collect();
    }
    if f.degree() == Some(0) {
        return vec![];
    }
    let x = FpPoly::x(f.p);
    let g = f.gcd(&x.pow_mod(f.p as u128, f).sub(&x));
    let mut out = Vec::new();
    split_linear(&g, &mut out);
    out.sort_unstable();
    out
}

fn split_linear(g: &FpPoly, out: &mut Vec<u64>) {
    let p = g.p;
    match g.degree() {
        None | Some(0) => {}
        Some(1) => {
            let inv = inv_mod(g.c[1] as i128, p).unwrap();
            out.push((p - mul_mod(g.c[0], inv, p)) % p);
        }
        Some(n) => {
            let one = FpPoly::new(vec![1], p);
            for a in 0..p {
                let shifted = FpPoly::new(vec![a, 1], p);
                let h = g.gcd(&shifted.pow_mod(((p - 1) / 2) as u128, g).sub(&one));
                let dh = h.degree().unwrap_or(0);
                if dh > 0 && dh < n {
                    split_linear(&h, out);
                    split_linear(&g.quo(&h), out);
                    return;
                }
            }
            unreachable!("a squarefree split polynomial always separates");
        }
    }
}

/// `v_p`: number of roots of `f` in `F_p`. A polynomial vanishing identically mod `p`
/// is an error unless `allow_degenerate`, in which case every residue counts.
pub fn local_count_vp(f: &IntPoly1, p: u64, allow_degenerate: bool) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    let fp = FpPoly::from_int(f, p);
    if fp.is_zero() {
        if allow_degenerate {
            return Ok(p);
        }
        return Err(Error::domain(format!("polynomial vanishes identically mod {p}")));
    }
    Ok(if p < SCAN_LIMIT {
        count_roots_scan(&fp)
    } else {
        count_roots_gcd(&fp)
    })
}
