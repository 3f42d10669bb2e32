//! Finite fields, local root counts, complete exponential sums and point counts.

mod expsum;
mod ext;
mod poly;
mod surface;

pub use expsum::{
    phi_sum, phi_sum_direct, psi_sum, psi_sum_direct, psi_sum_factorized, sigma_t,
    sigma_t_direct, ExpSumValue, PhiEngine, RootsTable,
};
pub use ext::{
    affine_point_count, cone_point_count, moment_statistic, tuple_pattern_constants, ExtField,
    MomentReport,
};
pub use poly::{
    count_roots_gcd, count_roots_scan, local_count_vp, roots_mod_p, FpPoly, SCAN_LIMIT,
};
pub use surface::{build_sieve_surface, shifted_cofactor_family, SieveSurface};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::polyarith::MPoly;

/// `x^e mod p`.
pub fn pow_mod(x: u64, mut e: u64, p: u64) -> u64 {
    let mut base = (x % p) as u128;
    let mut acc: u128 = 1 % p as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    acc as u64
}

/// `x * y mod m`.
pub fn mul_mod(x: u64, y: u64, m: u64) -> u64 {
    if x < 1 << 32 && y < 1 << 32 {
        return x * y % m;
    }
    ((x as u128 * y as u128) % m as u128) as u64
}

/// Inverse of `x` modulo `m`, if `gcd(x, m) = 1`.
pub fn inv_mod(x: i128, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let m = m as i128;
    let e = x.rem_euclid(m).extended_gcd(&m);
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m) as u64)
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes up to `n` in increasing order.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&k| is_prime(k)).collect()
}

/// Prime-power factorization `[(p, e)]` of `n >= 1`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Reduction of an integer into `[0, m)`.
pub fn reduce(c: &BigInt, m: u64) -> u64 {
    c.mod_floor(&BigInt::from(m)).to_u64().expect("residue fits")
}

/// The prime field `Z/pZ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        if p >= 1 << 32 {
            return Err(Error::domain("field characteristic must be below 2^32"));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn add(&self, x: u64, y: u64) -> u64 {
        (x + y) % self.p
    }

    pub fn sub(&self, x: u64, y: u64) -> u64 {
        (x + self.p - y) % self.p
    }

    pub fn mul(&self, x: u64, y: u64) -> u64 {
        x * y % self.p
    }

    pub fn neg(&self, x: u64) -> u64 {
        (self.p - x) % self.p
    }

    pub fn pow(&self, x: u64, e: u64) -> u64 {
        pow_mod(x, e, self.p)
    }

    pub fn inv(&self, x: u64) -> Result<u64> {
        if x % self.p == 0 {
            return Err(Error::ZeroDivisor);
        }
        Ok(pow_mod(x, self.p - 2, self.p))
    }

    pub fn from_int(&self, c: &BigInt) -> u64 {
        reduce(c, self.p)
    }
}

/// A multivariate integer polynomial with coefficients reduced modulo `m`, for fast
/// repeated evaluation at residues.
#[derive(Clone, Debug)]
pub struct ReducedPoly {
    m: u64,
    nvars: usize,
    terms: Vec<(Vec<u32>, u64)>,
    max_exp: Vec<u32>,
}

impl ReducedPoly {
    pub fn new(f: &MPoly, m: u64) -> Self {
        let nvars = f.nvars();
        let mut max_exp = vec![0; nvars];
        let mut terms = Vec::new();
        for (e, c) in f.terms() {
            let c = reduce(c, m);
            if c != 0 {
                for (k, &x) in e.iter().enumerate() {
                    max_exp[k] = max_exp[k].max(x);
                }
                terms.push((e.clone(), c));
            }
        }
        ReducedPoly {
            m,
            nvars,
            terms,
            max_exp,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Value at a point whose coordinates are already reduced mod `m`.
    pub fn eval(&self, pt: &[u64]) -> u64 {
        let m = self.m as u128;
        let powers: Vec<Vec<u128>> = (0..self.nvars)
            .map(|k| {
                let mut v = Vec::with_capacity(self.max_exp[k] as usize + 1);
                let mut acc = 1 % m;
                for _ in 0..=self.max_exp[k] {
                    v.push(acc);
                    acc = acc * pt[k] as u128 % m;
                }
                v
            })
            .collect();
        let mut s: u128 = 0;
        for (e, c) in &self.terms {
            let mut t = *c as u128;
            for (k, &x) in e.iter().enumerate() {
                if x > 0 {
                    t = t * powers[k][x as usize] % m;
                }
            }
            s += t;
            if s >= m << 64 {
                s %= m;
            }
        }
        (s % m) as u64
    }
}
