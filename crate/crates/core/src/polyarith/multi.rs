//! Sparse multivariate integer polynomials.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::rat::RatPoly1;
use super::uni::IntPoly1;

/// Sparse polynomial over the integers in named variables. Keys are exponent
/// vectors (one entry per variable); zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MPoly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

/// Bivariate polynomials are `MPoly` values in two variables.
pub type IntPoly2 = MPoly;

impl MPoly {
    pub fn zero(vars: &[&str]) -> Self {
        MPoly {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            terms: BTreeMap::new(),
        }
    }

    pub fn zero_like(&self) -> Self {
        MPoly {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(vars: &[&str], terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, BigInt)>,
    {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    /// Convenience constructor from `(exponents, coefficient)` pairs.
    pub fn from_i64(vars: &[&str], terms: &[(&[u32], i64)]) -> Self {
        Self::from_terms(
            vars,
            terms.iter().map(|(e, c)| (e.to_vec(), BigInt::from(*c))),
        )
    }

    pub fn constant_like(&self, c: BigInt) -> Self {
        let mut p = self.zero_like();
        p.add_term(vec![0; self.vars.len()], c);
        p
    }

    /// The variable with index `i`.
    pub fn var_like(&self, i: usize) -> Self {
        let mut e = vec![0; self.vars.len()];
        e[i] = 1;
        let mut p = self.zero_like();
        p.add_term(e, BigInt::one());
        p
    }

    /// Embeds a univariate polynomial as a polynomial in variable `i`.
    pub fn from_uni(p: &IntPoly1, i: usize, vars: &[&str]) -> Self {
        let mut out = Self::zero(vars);
        for (k, c) in p.coeffs().iter().enumerate() {
            let mut e = vec![0; vars.len()];
            e[i] = k as u32;
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, BigInt> {
        &self.terms
    }

    pub fn coeff(&self, e: &[u32]) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[i]).max()
    }

    /// Sum of the terms of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        let mut p = self.zero_like();
        for (e, c) in &self.terms {
            if e.iter().sum::<u32>() == d {
                p.terms.insert(e.clone(), c.clone());
            }
        }
        p
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match it.next() {
            None => true,
            Some(d) => it.all(|x| x == d),
        }
    }

    /// gcd of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut p = self.zero_like();
        if c.is_zero() {
            return p;
        }
        for (e, v) in &self.terms {
            p.terms.insert(e.clone(), v * c);
        }
        p
    }

    /// Exact division of every coefficient by `c`; `None` if inexact.
    pub fn div_scalar_exact(&self, c: &BigInt) -> Option<Self> {
        let mut p = self.zero_like();
        for (e, v) in &self.terms {
            let (q, r) = v.div_rem(c);
            if !r.is_zero() {
                return None;
            }
            p.terms.insert(e.clone(), q);
        }
        Some(p)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = self.constant_like(BigInt::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, pt: &[BigInt]) -> BigInt {
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in pt.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_i64(&self, pt: &[i64]) -> BigInt {
        let v: Vec<BigInt> = pt.iter().map(|&x| BigInt::from(x)).collect();
        self.eval(&v)
    }

    pub fn eval_rat(&self, pt: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = BigRational::from_integer(c.clone());
            for (x, &k) in pt.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Value at `pt` (entries already reduced mod `p`), reduced into `[0, p)`.
    pub fn eval_mod(&self, pt: &[u64], p: u64) -> u64 {
        let m = BigInt::from(p);
        let mut acc: u128 = 0;
        for (e, c) in &self.terms {
            let mut t = c.mod_floor(&m).to_u64().unwrap_or(0) as u128;
            for (x, &k) in pt.iter().zip(e) {
                t = t * crate::ffield::pow_mod(*x, k as u64, p) as u128 % p as u128;
            }
            acc = (acc + t) % p as u128;
        }
        acc as u64
    }

    /// Partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> Self {
        let mut p = self.zero_like();
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            p.add_term(e2, c * BigInt::from(e[i]));
        }
        p
    }

    /// Replaces each variable by a univariate polynomial (all in one variable).
    pub fn substitute_uni(&self, subs: &[IntPoly1]) -> IntPoly1 {
        let var = subs.first().map(|s| s.var().to_string()).unwrap_or_else(|| "x".into());
        let mut cache: Vec<Vec<IntPoly1>> = subs.iter().map(|s| vec![IntPoly1::constant(BigInt::one(), &var), s.clone()]).collect();
        let mut acc = IntPoly1::zero(&var);
        for (e, c) in &self.terms {
            let mut t = IntPoly1::constant(c.clone(), &var);
            for (i, &k) in e.iter().enumerate() {
                let k = k as usize;
                while cache[i].len() <= k {
                    let next = &cache[i][cache[i].len() - 1] * &subs[i];
                    cache[i].push(next);
                }
                t = &t * &cache[i][k];
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Replaces each variable by a rational univariate polynomial.
    pub fn substitute_rat(&self, subs: &[RatPoly1]) -> RatPoly1 {
        let var = subs.first().map(|s| s.var().to_string()).unwrap_or_else(|| "x".into());
        let mut acc = RatPoly1::zero(&var);
        for (e, c) in &self.terms {
            let mut t = RatPoly1::constant(BigRational::from_integer(c.clone()), &var);
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t = &t * &subs[i];
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Replaces each variable by a multivariate polynomial over `target` variables.
    pub fn substitute(&self, subs: &[MPoly]) -> MPoly {
        let base = subs[0].zero_like();
        let mut acc = base.clone();
        for (e, c) in &self.terms {
            let mut t = base.constant_like(c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = &t * &subs[i].pow(k);
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Fixes variable `i` to `value`, keeping the variable list.
    pub fn specialize(&self, i: usize, value: &BigInt) -> Self {
        let mut p = self.zero_like();
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2[i];
            e2[i] = 0;
            p.add_term(e2, c * num_traits::pow(value.clone(), k as usize));
        }
        p
    }

    /// Univariate polynomial in variable `i` after fixing all other variables.
    pub fn slice(&self, i: usize, others: &[BigInt]) -> IntPoly1 {
        let n = self.degree_in(i).unwrap_or(0) as usize;
        let mut v = vec![BigInt::zero(); n + 1];
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (j, &k) in e.iter().enumerate() {
                if j != i && k > 0 {
                    t *= num_traits::pow(others[j].clone(), k as usize);
                }
            }
            v[e[i] as usize] += t;
        }
        IntPoly1::new(v, &self.vars[i])
    }

    /// Coefficients as a polynomial in variable `i` (index = power).
    pub fn coeffs_in(&self, i: usize) -> Vec<MPoly> {
        let n = self.degree_in(i).map(|d| d as usize + 1).unwrap_or(0);
        let mut out = vec![self.zero_like(); n];
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2[i] as usize;
            e2[i] = 0;
            out[k].add_term(e2, c.clone());
        }
        out
    }

    /// Univariate view when only variable `i` occurs.
    pub fn to_uni(&self, i: usize) -> Option<IntPoly1> {
        let n = self.degree_in(i).unwrap_or(0) as usize;
        let mut v = vec![BigInt::zero(); n + 1];
        for (e, c) in &self.terms {
            if e.iter().enumerate().any(|(j, &k)| j != i && k > 0) {
                return None;
            }
            v[e[i] as usize] = c.clone();
        }
        Some(IntPoly1::new(v, &self.vars[i]))
    }

    /// Appends a new variable `w` and homogenizes to total degree `deg`.
    pub fn homogenize(&self, w: &str, deg: u32) -> MPoly {
        let mut vars: Vec<&str> = self.vars.iter().map(|s| s.as_str()).collect();
        vars.push(w);
        let mut p = MPoly::zero(&vars);
        for (e, c) in &self.terms {
            let s: u32 = e.iter().sum();
            assert!(s <= deg, "homogenize below total degree");
            let mut e2 = e.clone();
            e2.push(deg - s);
            p.add_term(e2, c.clone());
        }
        p
    }

    /// Reorders variables: new variable `k` is old variable `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> MPoly {
        let vars: Vec<&str> = perm.iter().map(|&j| self.vars[j].as_str()).collect();
        let mut p = MPoly::zero(&vars);
        for (e, c) in &self.terms {
            let e2 = perm.iter().map(|&j| e[j]).collect();
            p.add_term(e2, c.clone());
        }
        p
    }

    /// Same terms over a different variable list of equal length.
    pub fn rename(&self, vars: &[&str]) -> MPoly {
        assert_eq!(vars.len(), self.vars.len());
        MPoly {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            terms: self.terms.clone(),
        }
    }

    /// Terms in graded-lexicographic order (highest first).
    pub fn graded_terms(&self) -> Vec<(&Vec<u32>, &BigInt)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        v
    }
}

fn check_vars(a: &MPoly, b: &MPoly) {
    assert_eq!(a.vars, b.vars, "variable lists differ");
}

impl<'a> Add<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn add(self, o: &MPoly) -> MPoly {
        check_vars(self, o);
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }
}

impl<'a> Sub<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn sub(self, o: &MPoly) -> MPoly {
        check_vars(self, o);
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), -c);
        }
        p
    }
}

impl<'a> Mul<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn mul(self, o: &MPoly) -> MPoly {
        check_vars(self, o);
        let mut acc: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                *acc.entry(e).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        MPoly {
            vars: self.vars.clone(),
            terms: acc,
        }
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(&BigInt::from(-1))
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(BigInt, Vec<(String, u32)>)> = self
            .graded_terms()
            .into_iter()
            .map(|(e, c)| {
                let vs = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| (self.vars[i].clone(), k))
                    .collect();
                (c.clone(), vs)
            })
            .collect();
        f.write_str(&super::print::format_terms(&terms))
    }
}
