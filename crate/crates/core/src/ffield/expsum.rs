//! Complete exponential sums: `Sigma_t` over `F_p^2`, `Phi` over a congruenced set mod `h`,
//! and the mixed sums `Psi_{i,j}` mod `pq|h|`.
//!
//! Every sum is first reduced to integer weights per residue class of the linear phase,
//! then evaluated once against a table of roots of unity with compensated summation.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::energy::GeneralInstance;
use crate::error::{Error, Result};
use crate::polyarith::MPoly;

use super::surface::SieveSurface;
use super::{factorize, inv_mod, is_prime, reduce, ReducedPoly};

/// A complex sum value; `exact` is set when the sum is a rational integer by construction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpSumValue {
    pub re: f64,
    pub im: f64,
    #[serde(serialize_with = "ser_opt_bigint")]
    pub exact: Option<BigInt>,
    pub summands: u128,
}

fn ser_opt_bigint<S: serde::Serializer>(v: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_some(&x.to_string()),
        None => s.serialize_none(),
    }
}

impl ExpSumValue {
    pub fn integer(n: BigInt, summands: u128) -> Self {
        ExpSumValue {
            re: n.to_f64().unwrap_or(f64::NAN),
            im: 0.0,
            exact: Some(n),
            summands,
        }
    }

    pub fn zero() -> Self {
        Self::integer(BigInt::zero(), 0)
    }

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn mul(&self, o: &ExpSumValue) -> ExpSumValue {
        let exact = match (&self.exact, &o.exact) {
            (Some(a), Some(b)) => Some(a * b),
            _ => None,
        };
        ExpSumValue {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
            exact,
            summands: self.summands.saturating_mul(o.summands.max(1)),
        }
    }

    pub fn scale(&self, c: &BigInt) -> ExpSumValue {
        let f = c.to_f64().unwrap_or(f64::NAN);
        ExpSumValue {
            re: self.re * f,
            im: self.im * f,
            exact: self.exact.as_ref().map(|e| e * c),
            summands: self.summands,
        }
    }

    pub fn conj(&self) -> ExpSumValue {
        ExpSumValue {
            im: -self.im,
            ..self.clone()
        }
    }

    /// `|self - other|` as complex numbers.
    pub fn distance(&self, o: &ExpSumValue) -> f64 {
        (self.re - o.re).hypot(self.im - o.im)
    }
}

/// `e(r/n) = exp(2 pi i r / n)` for every residue `r`.
#[derive(Clone, Debug)]
pub struct RootsTable {
    n: u64,
    table: Vec<(f64, f64)>,
}

impl RootsTable {
    pub fn new(n: u64) -> Self {
        let theta = std::f64::consts::TAU / n as f64;
        let table = (0..n)
            .map(|r| {
                let (s, c) = (theta * r as f64).sin_cos();
                (c, s)
            })
            .collect();
        RootsTable { n, table }
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    /// `sum_r w_r e(r/n)`.
    pub fn evaluate(&self, weights: &[u128], summands: u128) -> ExpSumValue {
        assert_eq!(weights.len() as u64, self.n);
        if weights.iter().skip(1).all(|&w| w == 0) {
            return ExpSumValue::integer(BigInt::from(weights[0]), summands);
        }
        let (mut re, mut im) = (0.0f64, 0.0f64);
        let (mut cr, mut ci) = (0.0f64, 0.0f64);
        for (w, &(c, s)) in weights.iter().zip(&self.table) {
            if *w == 0 {
                continue;
            }
            let w = *w as f64;
            let yr = w * c - cr;
            let tr = re + yr;
            cr = (tr - re) - yr;
            re = tr;
            let yi = w * s - ci;
            let ti = im + yi;
            ci = (ti - im) - yi;
            im = ti;
        }
        ExpSumValue {
            re,
            im,
            exact: None,
            summands,
        }
    }
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::domain(format!("{p} is not prime")))
    }
}

fn sigma_from_table(t: u32, p: u64, m: &BigInt, n: &BigInt, v: &[u32]) -> ExpSumValue {
    let (mr, nr) = (reduce(m, p), reduce(n, p));
    let mut w = vec![0u128; p as usize];
    for x in 0..p {
        for y in 0..p {
            let val = v[(x * p + y) as usize] as u128;
            let r = (mr * x + nr * y) % p;
            w[r as usize] += val.pow(t);
        }
    }
    RootsTable::new(p).evaluate(&w, (p * p) as u128)
}

/// `Sigma_t(p; M, N) = sum_{x,y in F_p} v_p(x,y)^t e((Mx + Ny)/p)`.
pub fn sigma_t(t: u32, p: u64, m: &BigInt, n: &BigInt, surface: &SieveSurface) -> Result<ExpSumValue> {
    check_prime(p)?;
    if t > 4 {
        return Err(Error::domain("t must be at most 4"));
    }
    Ok(sigma_from_table(t, p, m, n, &surface.v_table(p)))
}

/// `Sigma_t` with every `v_p(x, y)` computed by root counting of the detection polynomial.
pub fn sigma_t_direct(t: u32, p: u64, m: &BigInt, n: &BigInt, surface: &SieveSurface) -> Result<ExpSumValue> {
    check_prime(p)?;
    let v: Vec<u32> = (0..p * p)
        .into_par_iter()
        .map(|xy| {
            let f = surface.detection_poly(&BigInt::from(xy / p), &BigInt::from(xy % p));
            super::local_count_vp(&f, p, true).expect("prime checked") as u32
        })
        .collect();
    Ok(sigma_from_table(t, p, m, n, &v))
}

/// `Phi(h; M, N)` for one instance, computed through the Chinese remainder factorization
/// over prime powers. Solution sets mod each prime power are cached.
pub struct PhiEngine {
    target: MPoly,
    separable: Option<(MPoly, MPoly)>,
    cache: Mutex<HashMap<u64, Arc<Vec<(u32, u32)>>>>,
}

impl PhiEngine {
    pub fn new(inst: &GeneralInstance) -> Self {
        let d = inst.degree();
        let scale = num_traits::pow(BigInt::from(2) * &inst.a * &inst.b, (d - 1) as usize);
        let target = (&inst.f - &inst.f.constant_like(inst.k.clone())).scale(&scale);
        let mixed = target.terms().keys().any(|e| e[0] > 0 && e[1] > 0);
        let separable = (!mixed).then(|| {
            let vars: Vec<&str> = target.vars().iter().map(|s| s.as_str()).collect();
            let mut a = MPoly::zero(&vars);
            let mut b = MPoly::zero(&vars);
            for (e, c) in target.terms() {
                if e[1] == 0 {
                    a.add_term(e.clone(), c.clone());
                } else {
                    b.add_term(e.clone(), c.clone());
                }
            }
            (a, b)
        });
        PhiEngine {
            target,
            separable,
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// True when the congruence splits as `A(x) + B(y)`, so solution sets cost `O(q)`.
    pub fn is_separable(&self) -> bool {
        self.separable.is_some()
    }

    /// Residue pairs mod `q` with `(2ab)^(d-1) (f(x,y) - k) = 0`.
    pub fn solutions(&self, q: u64) -> Arc<Vec<(u32, u32)>> {
        if let Some(s) = self.cache.lock().unwrap().get(&q) {
            return s.clone();
        }
        let sols = match &self.separable {
            Some((a, b)) => {
                let ra = ReducedPoly::new(a, q);
                let rb = ReducedPoly::new(b, q);
                let mut by_value: HashMap<u64, Vec<u32>> = HashMap::new();
                for x in 0..q {
                    by_value.entry(ra.eval(&[x, 0])).or_default().push(x as u32);
                }
                let mut out = Vec::new();
                for y in 0..q {
                    let need = (q - rb.eval(&[0, y])) % q;
                    if let Some(xs) = by_value.get(&need) {
                        out.extend(xs.iter().map(|&x| (x, y as u32)));
                    }
                }
                out.sort_unstable();
                out
            }
            None => {
                let r = ReducedPoly::new(&self.target, q);
                (0..q)
                    .into_par_iter()
                    .flat_map_iter(|x| {
                        let r = &r;
                        (0..q).filter(move |&y| r.eval(&[x, y]) == 0).map(move |y| (x as u32, y as u32))
                    })
                    .collect()
            }
        };
        let sols = Arc::new(sols);
        self.cache.lock().unwrap().insert(q, sols.clone());
        sols
    }

    fn prime_power(&self, q: u64, m: u64, n: u64) -> ExpSumValue {
        let sols = self.solutions(q);
        let mut w = vec![0u128; q as usize];
        for &(x, y) in sols.iter() {
            let r = ((m as u128 * x as u128 + n as u128 * y as u128) % q as u128) as usize;
            w[r] += 1;
        }
        RootsTable::new(q).evaluate(&w, sols.len() as u128)
    }

    pub fn phi(&self, h: u64, m: &BigInt, n: &BigInt) -> Result<ExpSumValue> {
        if h == 0 {
            return Err(Error::domain("h must be positive"));
        }
        let mut acc = ExpSumValue::integer(BigInt::from(1), 1);
        for (p, e) in factorize(h) {
            let q = p.pow(e);
            let u = inv_mod((h / q) as i128, q).expect("coprime cofactor");
            let mq = reduce(m, q) as u128 * u as u128 % q as u128;
            let nq = reduce(n, q) as u128 * u as u128 % q as u128;
            acc = acc.mul(&self.prime_power(q, mq as u64, nq as u64));
        }
        Ok(acc)
    }
}

/// `Phi(h; M, N) = sum e((Mx + Ny)/h)` over residue pairs mod `h` with
/// `(2ab)^(d-1) f(x,y) = (2ab)^(d-1) k` mod `h`.
pub fn phi_sum(h: u64, m: &BigInt, n: &BigInt, inst: &GeneralInstance) -> Result<ExpSumValue> {
    PhiEngine::new(inst).phi(h, m, n)
}

/// `Phi` by a direct double loop over residues mod `h`.
pub fn phi_sum_direct(h: u64, m: &BigInt, n: &BigInt, inst: &GeneralInstance) -> Result<ExpSumValue> {
    if h == 0 {
        return Err(Error::domain("h must be positive"));
    }
    let engine = PhiEngine::new(inst);
    let r = ReducedPoly::new(&engine.target, h);
    let (mr, nr) = (reduce(m, h) as u128, reduce(n, h) as u128);
    let mut w = vec![0u128; h as usize];
    let mut count = 0u128;
    for x in 0..h {
        for y in 0..h {
            if r.eval(&[x, y]) == 0 {
                w[((mr * x as u128 + nr * y as u128) % h as u128) as usize] += 1;
                count += 1;
            }
        }
    }
    Ok(RootsTable::new(h).evaluate(&w, count))
}

fn abs_h(surface: &SieveSurface, p: u64, q: u64) -> Result<u64> {
    check_prime(p)?;
    check_prime(q)?;
    let h = surface
        .h
        .abs()
        .to_u64()
        .ok_or_else(|| Error::domain("|h| too large"))?;
    if h % p == 0 || h % q == 0 {
        return Err(Error::domain("p and q must be coprime to h"));
    }
    Ok(h)
}

/// All nine `Psi_{i,j}(m, n)`, `0 <= i, j <= 2`, by a direct loop over residues mod `pq|h|`.
pub fn psi_sum_direct(
    m: &BigInt,
    n: &BigInt,
    p: u64,
    q: u64,
    surface: &SieveSurface,
) -> Result<[[ExpSumValue; 3]; 3]> {
    let h = abs_h(surface, p, q)?;
    let l = p * q * h;
    let vp = surface.v_table(p);
    let vq = surface.v_table(q);
    let mask = surface.congruence_mask(h);
    let (mr, nr) = (reduce(m, l) as u128, reduce(n, l) as u128);
    let weights: Vec<Vec<u128>> = (0..l)
        .into_par_iter()
        .fold(
            || vec![0u128; 9 * l as usize],
            |mut w, r| {
                for s in 0..l {
                    if !mask[((r % h) * h + s % h) as usize] {
                        continue;
                    }
                    let a = vp[((r % p) * p + s % p) as usize] as u128;
                    let b = vq[((r % q) * q + s % q) as usize] as u128;
                    let idx = ((mr * r as u128 + nr * s as u128) % l as u128) as usize;
                    let pa = [1, a, a * a];
                    let pb = [1, b, b * b];
                    for i in 0..3 {
                        for j in 0..3 {
                            w[(3 * i + j) * l as usize + idx] += pa[i] * pb[j];
                        }
                    }
                }
                w
            },
        )
        .collect();
    let mut total = vec![0u128; 9 * l as usize];
    for w in weights {
        for (t, x) in total.iter_mut().zip(w) {
            *t += x;
        }
    }
    let table = RootsTable::new(l);
    let summands = (l as u128) * (l as u128);
    let mut out: [[ExpSumValue; 3]; 3] = Default::default();
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let k = 3 * i + j;
            *cell = table.evaluate(&total[k * l as usize..(k + 1) * l as usize], summands);
        }
    }
    Ok(out)
}

impl Default for ExpSumValue {
    fn default() -> Self {
        ExpSumValue::zero()
    }
}

/// `Psi_{i,j}(m, n)` from the factorization into `Sigma` and `Phi` values.
#[allow(clippy::too_many_arguments)]
pub fn psi_sum_factorized(
    i: u32,
    j: u32,
    m: &BigInt,
    n: &BigInt,
    p: u64,
    q: u64,
    surface: &SieveSurface,
    engine: &PhiEngine,
) -> Result<ExpSumValue> {
    let h = abs_h(surface, p, q)?;
    if p != q {
        let pq = p * q;
        let hbar = inv_mod(h as i128, pq).expect("coprime") as i128;
        let pqbar = inv_mod(pq as i128, h).expect("coprime") as i128;
        let qp = inv_mod(q as i128, p).expect("distinct primes") as i128;
        let pp = inv_mod(p as i128, q).expect("distinct primes") as i128;
        let s1 = sigma_t(i, p, &(m * hbar * qp), &(n * hbar * qp), surface)?;
        let s2 = sigma_t(j, q, &(m * hbar * pp), &(n * hbar * pp), surface)?;
        let f = engine.phi(h, &(m * pqbar), &(n * pqbar))?;
        Ok(s1.mul(&s2).mul(&f))
    } else {
        let pb = BigInt::from(p);
        if !(m % &pb).is_zero() || !(n % &pb).is_zero() {
            return Ok(ExpSumValue::zero());
        }
        let (m1, n1) = (m / &pb, n / &pb);
        let hbar = inv_mod(h as i128, p).expect("coprime") as i128;
        let pbar = inv_mod(p as i128, h).expect("coprime") as i128;
        let s = sigma_t(i + j, p, &(&m1 * hbar), &(&n1 * hbar), surface)?;
        let f = engine.phi(h, &(&m1 * pbar), &(&n1 * pbar))?;
        Ok(s.mul(&f).scale(&BigInt::from(p * p)))
    }
}

/// `Psi_{i,j}(m, n)` by factorization, with a fresh `Phi` cache.
pub fn psi_sum(
    i: u32,
    j: u32,
    m: &BigInt,
    n: &BigInt,
    p: u64,
    q: u64,
    surface: &SieveSurface,
) -> Result<ExpSumValue> {
    psi_sum_factorized(i, j, m, n, p, q, surface, &PhiEngine::new(&surface.inst))
}
