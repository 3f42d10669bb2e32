//! Dense univariate polynomials over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::uni::IntPoly1;
use crate::error::{Error, Result};

/// Rational polynomial, `coeffs[i]` multiplies `var^i`; no trailing zeros.
/// `BigRational` keeps every coefficient in lowest terms with positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatPoly1 {
    coeffs: Vec<BigRational>,
    var: String,
}

impl RatPoly1 {
    pub fn new(mut coeffs: Vec<BigRational>, var: &str) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly1 {
            coeffs,
            var: var.to_string(),
        }
    }

    pub fn from_int(p: &IntPoly1) -> Self {
        Self::new(
            p.coeffs().iter().map(|c| BigRational::from_integer(c.clone())).collect(),
            p.var(),
        )
    }

    pub fn from_i64(coeffs: &[i64], var: &str) -> Self {
        Self::new(
            coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect(),
            var,
        )
    }

    pub fn zero(var: &str) -> Self {
        Self::new(Vec::new(), var)
    }

    pub fn constant(c: BigRational, var: &str) -> Self {
        Self::new(vec![c], var)
    }

    pub fn x(var: &str) -> Self {
        Self::new(vec![BigRational::zero(), BigRational::one()], var)
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    /// Constant value if the degree is at most zero.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.coeffs.len() {
            0 => Some(BigRational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
            .collect();
        Self::new(v, &self.var)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect(), &self.var)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lc().recip();
        self.scale(&inv)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &RatPoly1) -> (RatPoly1, RatPoly1) {
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (RatPoly1::zero(&self.var), self.clone());
        }
        let n = r.len() - 1;
        let inv = d.lc().recip();
        let mut q = vec![BigRational::zero(); n - dd + 1];
        for i in (0..=n - dd).rev() {
            let qi = &r[i + dd] * &inv;
            if !qi.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] -= &qi * dc;
                }
            }
            q[i] = qi;
        }
        r.truncate(dd);
        (RatPoly1::new(q, &self.var), RatPoly1::new(r, &self.var))
    }

    pub fn rem(&self, d: &RatPoly1) -> RatPoly1 {
        self.div_rem(d).1
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, o: &RatPoly1) -> RatPoly1 {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: returns `(g, s, t)` with `s*self + t*o = g`, `g` monic.
    pub fn ext_gcd(&self, o: &RatPoly1) -> (RatPoly1, RatPoly1, RatPoly1) {
        let var = &self.var;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (RatPoly1::constant(BigRational::one(), var), RatPoly1::zero(var));
        let (mut t0, mut t1) = (RatPoly1::zero(var), RatPoly1::constant(BigRational::one(), var));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s2 = &s0 - &(&q * &s1);
            let t2 = &t0 - &(&q * &t1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lc().recip();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Squarefree part, monic.
    pub fn squarefree_part(&self) -> RatPoly1 {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Primitive integer polynomial with the same roots (positive leading coefficient).
    pub fn to_primitive_int(&self) -> IntPoly1 {
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let v: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        let p = IntPoly1::new(v, &self.var);
        if p.is_zero() {
            return p;
        }
        let mut g = p.content();
        if p.lc().is_negative() {
            g = -g;
        }
        p.div_scalar_exact(&g).expect("content divides")
    }

    /// Integer polynomial when every coefficient is integral.
    pub fn to_int(&self) -> Result<IntPoly1> {
        let mut v = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            if !c.is_integer() {
                return Err(Error::invariant(format!("non-integral coefficient {c}")));
            }
            v.push(c.to_integer());
        }
        Ok(IntPoly1::new(v, &self.var))
    }

    /// `self(other(x))`.
    pub fn compose(&self, other: &RatPoly1) -> RatPoly1 {
        let mut acc = RatPoly1::zero(&other.var);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * other) + &RatPoly1::constant(c.clone(), &other.var);
        }
        acc
    }
}

impl<'a> Add<&'a RatPoly1> for &'a RatPoly1 {
    type Output = RatPoly1;
    fn add(self, o: &RatPoly1) -> RatPoly1 {
        let n = self.coeffs.len().max(o.coeffs.len());
        RatPoly1::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect(), &self.var)
    }
}

impl<'a> Sub<&'a RatPoly1> for &'a RatPoly1 {
    type Output = RatPoly1;
    fn sub(self, o: &RatPoly1) -> RatPoly1 {
        let n = self.coeffs.len().max(o.coeffs.len());
        RatPoly1::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect(), &self.var)
    }
}

impl<'a> Mul<&'a RatPoly1> for &'a RatPoly1 {
    type Output = RatPoly1;
    fn mul(self, o: &RatPoly1) -> RatPoly1 {
        if self.is_zero() || o.is_zero() {
            return RatPoly1::zero(&self.var);
        }
        let mut v = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        RatPoly1::new(v, &self.var)
    }
}

impl Neg for &RatPoly1 {
    type Output = RatPoly1;
    fn neg(self) -> RatPoly1 {
        RatPoly1::new(self.coeffs.iter().map(|c| -c).collect(), &self.var)
    }
}

impl fmt::Display for RatPoly1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let a = c.abs();
            let mono = match i {
                0 => String::new(),
                1 => self.var.clone(),
                _ => format!("{}^{}", self.var, i),
            };
            if mono.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                f.write_str(&mono)?;
            } else {
                write!(f, "{a}*{mono}")?;
            }
        }
        Ok(())
    }
}
