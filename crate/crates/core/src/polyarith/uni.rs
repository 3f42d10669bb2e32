//! Dense univariate polynomials over the integers.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rat::RatPoly1;
use crate::error::{Error, Result};

/// Dense integer polynomial; `coeffs[i]` is the coefficient of `var^i`.
/// Trailing zeros are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly1 {
    coeffs: Vec<BigInt>,
    var: String,
}

impl IntPoly1 {
    pub fn new(mut coeffs: Vec<BigInt>, var: &str) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly1 {
            coeffs,
            var: var.to_string(),
        }
    }

    pub fn from_i64(coeffs: &[i64], var: &str) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect(), var)
    }

    pub fn zero(var: &str) -> Self {
        Self::new(Vec::new(), var)
    }

    pub fn constant(c: BigInt, var: &str) -> Self {
        Self::new(vec![c], var)
    }

    /// The polynomial `var`.
    pub fn x(var: &str) -> Self {
        Self::new(vec![BigInt::zero(), BigInt::one()], var)
    }

    pub fn monomial(c: BigInt, e: usize, var: &str) -> Self {
        let mut v = vec![BigInt::zero(); e + 1];
        v[e] = c;
        Self::new(v, var)
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn with_var(mut self, var: &str) -> Self {
        self.var = var.to_string();
        self
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `var^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_i64(&self, x: i64) -> BigInt {
        self.eval(&BigInt::from(x))
    }

    /// Value at `x` reduced into `[0, p)`.
    pub fn eval_mod(&self, x: u64, p: u64) -> u64 {
        let m = BigInt::from(p);
        let mut acc: u128 = 0;
        for c in self.coeffs.iter().rev() {
            let cm = c.mod_floor(&m).to_u64().unwrap_or(0) as u128;
            acc = (acc * x as u128 + cm) % p as u128;
        }
        acc as u64
    }

    /// Coefficients reduced into `[0, p)`.
    pub fn reduce_mod(&self, p: u64) -> Vec<u64> {
        let m = BigInt::from(p);
        self.coeffs
            .iter()
            .map(|c| c.mod_floor(&m).to_u64().unwrap_or(0))
            .collect()
    }

    pub fn derivative(&self) -> Self {
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect();
        Self::new(v, &self.var)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect(), &self.var)
    }

    /// gcd of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Exact division of all coefficients by `c`.
    pub fn div_scalar_exact(&self, c: &BigInt) -> Result<Self> {
        let mut v = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            let (q, r) = a.div_rem(c);
            if !r.is_zero() {
                return Err(Error::invariant("inexact scalar division"));
            }
            v.push(q);
        }
        Ok(Self::new(v, &self.var))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(BigInt::one(), &self.var);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `self(other(x))`.
    pub fn compose(&self, other: &IntPoly1) -> Self {
        let mut acc = Self::zero(&other.var);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * other) + &Self::constant(c.clone(), &other.var);
        }
        acc
    }

    /// `self(b*x + c)`.
    pub fn compose_affine(&self, b: &BigInt, c: &BigInt) -> Self {
        self.compose(&Self::new(vec![c.clone(), b.clone()], &self.var))
    }

    /// Taylor shift `self(x + c)`.
    pub fn shift(&self, c: &BigInt) -> Self {
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = &a[j + 1] * c;
                a[j] += t;
            }
        }
        Self::new(a, &self.var)
    }

    /// Exact division by `d`; `None` when `d` does not divide `self` over the integers.
    pub fn div_exact(&self, d: &IntPoly1) -> Option<IntPoly1> {
        let dd = d.degree()?;
        if self.is_zero() {
            return Some(self.clone());
        }
        let n = self.degree().unwrap();
        if n < dd {
            return None;
        }
        let mut r = self.coeffs.clone();
        let lc = d.lc();
        let mut q = vec![BigInt::zero(); n - dd + 1];
        for i in (0..=n - dd).rev() {
            let (qi, rem) = r[i + dd].div_rem(&lc);
            if !rem.is_zero() {
                return None;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[i + j] -= &qi * dc;
            }
            q[i] = qi;
        }
        if r.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::new(q, &self.var))
    }

    pub fn to_rat(&self) -> RatPoly1 {
        RatPoly1::from_int(self)
    }

    /// Largest absolute coefficient.
    pub fn height(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default()
    }

    /// Multiplicity of zero as a root, and the cofactor.
    pub fn strip_x_power(&self) -> (usize, IntPoly1) {
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        (k, Self::new(self.coeffs[k.min(self.coeffs.len())..].to_vec(), &self.var))
    }
}

impl<'a> Add<&'a IntPoly1> for &'a IntPoly1 {
    type Output = IntPoly1;
    fn add(self, o: &IntPoly1) -> IntPoly1 {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n).map(|i| self.coeff(i) + o.coeff(i)).collect();
        IntPoly1::new(v, &self.var)
    }
}

impl<'a> Sub<&'a IntPoly1> for &'a IntPoly1 {
    type Output = IntPoly1;
    fn sub(self, o: &IntPoly1) -> IntPoly1 {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n).map(|i| self.coeff(i) - o.coeff(i)).collect();
        IntPoly1::new(v, &self.var)
    }
}

impl<'a> Mul<&'a IntPoly1> for &'a IntPoly1 {
    type Output = IntPoly1;
    fn mul(self, o: &IntPoly1) -> IntPoly1 {
        if self.is_zero() || o.is_zero() {
            return IntPoly1::zero(&self.var);
        }
        let mut v = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        IntPoly1::new(v, &self.var)
    }
}

impl Neg for &IntPoly1 {
    type Output = IntPoly1;
    fn neg(self) -> IntPoly1 {
        IntPoly1::new(self.coeffs.iter().map(|c| -c).collect(), &self.var)
    }
}

impl fmt::Display for IntPoly1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(BigInt, Vec<(String, u32)>)> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let vars = if i == 0 {
                    vec![]
                } else {
                    vec![(self.var.clone(), i as u32)]
                };
                (c.clone(), vars)
            })
            .collect();
        f.write_str(&super::print::format_terms(&terms))
    }
}
