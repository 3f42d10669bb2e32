//! Root counts of polynomial congruences mod prime powers, linear congruences, the line
//! certificate `Delta_f(M, N, k)` and the partial sums of `Phi`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::energy::GeneralInstance;
use crate::error::{Error, Result};
use crate::ffield::{count_roots_gcd, inv_mod, is_prime, reduce, roots_mod_p, FpPoly, PhiEngine};
use crate::polyarith::{binary_form_discriminant, IntPoly1, MPoly};
use crate::ser::{ser_bigint, ser_bigints};

/// `Q(x) = 0 mod p^l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceQuery {
    pub q: IntPoly1,
    pub p: u64,
    pub l: u32,
}

impl CongruenceQuery {
    pub fn new(q: IntPoly1, p: u64, l: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        if l == 0 {
            return Err(Error::domain("exponent must be at least 1"));
        }
        Ok(CongruenceQuery { q, p, l })
    }
}

/// `v_p(x)`, `None` for zero.
pub fn valuation(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    loop {
        let (q, r) = y.div_rem(&pb);
        if !r.is_zero() {
            return Some(v);
        }
        y = q;
        v += 1;
    }
}

/// Minimum valuation over the coefficients, `None` for the zero polynomial.
pub fn content_valuation(q: &IntPoly1, p: u64) -> Option<u32> {
    q.coeffs().iter().filter_map(|c| valuation(c, p)).min()
}

fn reduce_coeffs(q: &IntPoly1, m: &BigInt) -> IntPoly1 {
    IntPoly1::new(q.coeffs().iter().map(|c| c.mod_floor(m)).collect(), q.var())
}

fn upow(p: u64, e: u32) -> BigUint {
    num_traits::pow(BigUint::from(p), e as usize)
}

/// Residues `x` mod `p^k` with `q(x) = 0` mod `p^k`. Each node strips the `p`-content of
/// its polynomial; a root `r` mod `p` that is singular descends to `q(r + pT) / p^c`.
fn lift_count(q: &IntPoly1, p: u64, k: u32) -> BigUint {
    let pb = BigInt::from(p);
    let modulus = num_traits::pow(pb.clone(), k as usize);
    let q = reduce_coeffs(q, &modulus);
    let c = match content_valuation(&q, p) {
        None => return upow(p, k),
        Some(c) => c,
    };
    if c > 0 {
        let pc = num_traits::pow(pb, c as usize);
        let stripped = q.div_scalar_exact(&pc).expect("content divides");
        return upow(p, c) * lift_count(&stripped, p, k - c);
    }
    let fp = FpPoly::from_int(&q, p);
    if k == 1 {
        return BigUint::from(count_roots_gcd(&fp));
    }
    let roots = roots_mod_p(&fp);
    let dq = FpPoly::from_int(&q.derivative(), p);
    roots
        .par_iter()
        .map(|&r| {
            if dq.eval(r) != 0 {
                return BigUint::one();
            }
            let shifted = reduce_coeffs(&q.compose_affine(&pb, &BigInt::from(r)), &modulus);
            match content_valuation(&shifted, p) {
                None => upow(p, k - 1),
                Some(c) => {
                    let pc = num_traits::pow(pb.clone(), c as usize);
                    let stripped = shifted.div_scalar_exact(&pc).expect("content divides");
                    upow(p, c - 1) * lift_count(&stripped, p, k - c)
                }
            }
        })
        .sum()
}

/// `#{x in Z/p^l : Q(x) = 0 mod p^l}` by Hensel-tree lifting. The tree has at most
/// `deg Q` nodes per level, so no work budget is needed.
pub fn count_roots_mod_prime_power(q: &CongruenceQuery) -> BigUint {
    lift_count(&q.q, q.p, q.l)
}

/// `count / p^(l - l/d + v_p(a_d)/d)` with `d = deg Q`.
pub fn padic_ratio(q: &CongruenceQuery) -> Result<f64> {
    let d = match q.q.degree() {
        Some(d) if d >= 1 => d as f64,
        _ => return Err(Error::domain("the p-adic bound needs a nonconstant polynomial")),
    };
    let v = valuation(&q.q.lc(), q.p).unwrap_or(0) as f64;
    let l = q.l as f64;
    let count = count_roots_mod_prime_power(q);
    let exponent = l - l / d + v / d;
    let log_count = count.to_f64().unwrap_or(f64::INFINITY).ln();
    Ok((log_count - exponent * (q.p as f64).ln()).exp())
}

/// `#{x in [0, p^l) : p^m | Ax + B}` for `p` not dividing `A`.
pub fn count_linear_congruence(a: &BigInt, b: &BigInt, p: u64, l: u32, m: u32) -> Result<BigUint> {
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    if (a % BigInt::from(p)).is_zero() {
        return Err(Error::domain(format!("{p} divides the linear coefficient")));
    }
    if m <= l {
        return Ok(upow(p, l - m));
    }
    let pm = num_traits::pow(BigInt::from(p), m as usize);
    let e = a.mod_floor(&pm).extended_gcd(&pm);
    let x0 = (-b * e.x).mod_floor(&pm);
    let pl = num_traits::pow(BigInt::from(p), l as usize);
    Ok(BigUint::from(u8::from(x0 < pl)))
}

/// Which step of the case analysis produced the certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DeltaCase {
    #[serde(rename = "leading-form")]
    LeadingForm,
    #[serde(rename = "partial-derivative")]
    PartialDerivative,
    #[serde(rename = "E_J-numerator")]
    EjNumerator,
    #[serde(rename = "E0-minus-k")]
    E0MinusK,
}

/// A nonzero integer divisible by every prime `p` (large in terms of `d`, not dividing
/// `gcd(M, N)`) for which `f = k` contains a line `Mx + Ny = tau` over `F_p`-bar.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaCertificate {
    #[serde(serialize_with = "ser_bigint")]
    pub m: BigInt,
    #[serde(serialize_with = "ser_bigint")]
    pub n: BigInt,
    #[serde(serialize_with = "ser_bigint")]
    pub k: BigInt,
    pub case: DeltaCase,
    #[serde(rename = "delta", serialize_with = "ser_bigint")]
    pub value: BigInt,
    /// `M` and `N` were exchanged along with `x` and `y`.
    pub swapped: bool,
    /// `J`, when the `E_J` branch fired.
    pub top_index: Option<u32>,
    #[serde(serialize_with = "ser_bigints")]
    pub a_values: Vec<BigInt>,
    #[serde(serialize_with = "ser_bigints")]
    pub b_values: Vec<BigInt>,
    pub degree: u32,
}

impl DeltaCertificate {
    /// `|Delta| / (|k| max(|M|,|N|)^(d^2))`.
    pub fn bound_ratio(&self) -> f64 {
        let big = self.m.abs().max(self.n.abs());
        let k = self.k.abs().max(BigInt::one());
        let log = |x: &BigInt| x.to_f64().unwrap_or(f64::INFINITY).ln();
        let d2 = (self.degree * self.degree) as f64;
        (log(&self.value.abs()) - log(&k) - d2 * log(&big)).exp()
    }
}

/// Values at `(N, -M)` for the orientation with `N` in the second slot.
struct Expansion {
    leading: BigInt,
    dy: BigInt,
    a: Vec<BigInt>,
    b: Vec<BigInt>,
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

fn expansion(f: &MPoly, m: &BigInt, n: &BigInt, d: u32) -> Expansion {
    let pt = [n.clone(), -m];
    let parts: Vec<MPoly> = (0..=d).map(|i| f.homogeneous_part(i)).collect();
    let leading = parts[d as usize].eval(&pt);
    let dy = parts[d as usize].partial(1).eval(&pt);
    let next = parts[d as usize - 1].eval(&pt);
    let mut a = Vec::with_capacity(d as usize + 1);
    let mut b = Vec::with_capacity(d as usize + 1);
    for j in 0..=d {
        let mut acc = BigInt::zero();
        for i in j..=d {
            let r = i - j;
            let mut deriv = parts[i as usize].clone();
            for _ in 0..r {
                deriv = deriv.partial(1);
            }
            let mut t = factorial(d - j) / factorial(r)
                * num_traits::pow(next.clone(), r as usize)
                * num_traits::pow(dy.clone(), (d - i) as usize)
                * deriv.eval(&pt);
            if r % 2 == 1 {
                t = -t;
            }
            acc += t;
        }
        a.push(acc);
        b.push(num_traits::pow(n.clone(), j as usize) * num_traits::pow(dy.clone(), (d - j) as usize) * factorial(d - j));
    }
    Expansion { leading, dy, a, b }
}

/// The coefficients `E_j = A_j / B_j` of `f(x, (tau - Mx)/N)` after `tau` is fixed by the
/// vanishing of the `x^(d-1)` coefficient, as `(A_j, B_j)` pairs. Requires `N != 0`,
/// `f_d(N,-M) = 0` and a nonzero `y`-derivative of `f_d` at `(N,-M)`.
pub fn line_expansion(f: &MPoly, m: &BigInt, n: &BigInt) -> Result<(Vec<BigInt>, Vec<BigInt>)> {
    let d = check_curve(f)?;
    if n.is_zero() {
        return Err(Error::domain("N must be nonzero"));
    }
    let e = expansion(f, m, n, d);
    if !e.leading.is_zero() || e.dy.is_zero() {
        return Err(Error::domain("f_d(N,-M) must vanish with a nonzero y-derivative"));
    }
    Ok((e.a, e.b))
}

/// The translate `tau = -N f_{d-1}(N,-M) / (df_d/dy)(N,-M)` as a numerator/denominator pair.
pub fn line_offset(f: &MPoly, m: &BigInt, n: &BigInt) -> Result<(BigInt, BigInt)> {
    let d = check_curve(f)?;
    let pt = [n.clone(), -m];
    let dy = f.homogeneous_part(d).partial(1).eval(&pt);
    if dy.is_zero() {
        return Err(Error::domain("y-derivative of f_d vanishes at (N,-M)"));
    }
    Ok((-(n * f.homogeneous_part(d - 1).eval(&pt)), dy))
}

fn check_curve(f: &MPoly) -> Result<u32> {
    if f.nvars() != 2 {
        return Err(Error::domain("f must be bivariate"));
    }
    match f.total_degree() {
        Some(d) if d >= 2 => Ok(d),
        _ => Err(Error::domain("f must have degree at least 2")),
    }
}

fn swap_xy(f: &MPoly) -> MPoly {
    f.permute(&[1, 0])
}

fn check_leading_form(f: &MPoly, d: u32) -> Result<()> {
    if binary_form_discriminant(&f.homogeneous_part(d))?.is_zero() {
        return Err(Error::domain("the top form of f is not squarefree"));
    }
    Ok(())
}

/// `Delta_f(M, N, k)` valid for every prime at once: `f_d(N,-M)` when nonzero, otherwise
/// `N * D * A_J` or `N * D * (A_0 - k B_0)` with `D = (df_d/dy)(N,-M)`.
pub fn delta_f(f: &MPoly, k: &BigInt, m: &BigInt, n: &BigInt) -> Result<DeltaCertificate> {
    let d = check_curve(f)?;
    check_leading_form(f, d)?;
    if m.is_zero() && n.is_zero() {
        return Err(Error::domain("M and N must not both vanish"));
    }
    let swapped = n.is_zero();
    let (g, mm, nn) = if swapped {
        (swap_xy(f), n.clone(), m.clone())
    } else {
        (f.clone(), m.clone(), n.clone())
    };
    let e = expansion(&g, &mm, &nn, d);
    let mut cert = DeltaCertificate {
        m: m.clone(),
        n: n.clone(),
        k: k.clone(),
        case: DeltaCase::LeadingForm,
        value: e.leading.clone(),
        swapped,
        top_index: None,
        a_values: vec![],
        b_values: vec![],
        degree: d,
    };
    if !e.leading.is_zero() {
        return Ok(cert);
    }
    if e.dy.is_zero() {
        return Err(Error::invariant("squarefree top form with a vanishing derivative"));
    }
    let scale = &nn * &e.dy;
    finish_cascade(&mut cert, &e, k, d, &scale)?;
    Ok(cert)
}

fn finish_cascade(cert: &mut DeltaCertificate, e: &Expansion, k: &BigInt, d: u32, scale: &BigInt) -> Result<()> {
    cert.a_values = e.a.clone();
    cert.b_values = e.b.clone();
    if let Some(j) = (1..d).rev().find(|&j| !e.a[j as usize].is_zero()) {
        cert.case = DeltaCase::EjNumerator;
        cert.top_index = Some(j);
        cert.value = scale * &e.a[j as usize];
        return Ok(());
    }
    let rest = &e.a[0] - k * &e.b[0];
    if rest.is_zero() {
        return Err(Error::domain("f = k contains a line defined over Q"));
    }
    cert.case = DeltaCase::E0MinusK;
    cert.value = scale * rest;
    Ok(())
}

/// The case cascade at a fixed prime `p` not dividing `gcd(M, N)`: orients so that `p`
/// does not divide `N`, then returns `f_d(N,-M)`, `(df_d/dy)(N,-M)` when `p` divides it,
/// `A_J`, or `A_0 - k B_0`.
pub fn delta_f_at_prime(f: &MPoly, k: &BigInt, m: &BigInt, n: &BigInt, p: u64) -> Result<DeltaCertificate> {
    let d = check_curve(f)?;
    check_leading_form(f, d)?;
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    if reduce(m, p) == 0 && reduce(n, p) == 0 {
        return Err(Error::domain(format!("{p} divides both M and N")));
    }
    let swapped = reduce(n, p) == 0;
    let (g, mm, nn) = if swapped {
        (swap_xy(f), n.clone(), m.clone())
    } else {
        (f.clone(), m.clone(), n.clone())
    };
    let e = expansion(&g, &mm, &nn, d);
    let mut cert = DeltaCertificate {
        m: m.clone(),
        n: n.clone(),
        k: k.clone(),
        case: DeltaCase::LeadingForm,
        value: e.leading.clone(),
        swapped,
        top_index: None,
        a_values: vec![],
        b_values: vec![],
        degree: d,
    };
    if !e.leading.is_zero() {
        return Ok(cert);
    }
    if e.dy.is_zero() {
        return Err(Error::invariant("squarefree top form with a vanishing derivative"));
    }
    if reduce(&e.dy, p) == 0 {
        cert.case = DeltaCase::PartialDerivative;
        cert.value = e.dy;
        return Ok(cert);
    }
    finish_cascade(&mut cert, &e, k, d, &BigInt::one())?;
    Ok(cert)
}

/// `f(x, y) - k` restricted to `Mx + Ny = tau` vanishes identically over `F_p`.
pub fn line_in_curve_mod_p(f: &MPoly, k: &BigInt, m: &BigInt, n: &BigInt, tau: u64, p: u64) -> Result<bool> {
    if f.nvars() != 2 {
        return Err(Error::domain("f must be bivariate"));
    }
    let (mr, nr) = (reduce(m, p), reduce(n, p));
    let (g, lead, free) = if nr != 0 {
        (f.clone(), nr, mr)
    } else if mr != 0 {
        (swap_xy(f), mr, nr)
    } else {
        return Err(Error::domain(format!("{p} divides both M and N")));
    };
    // second variable = c0 + c1 * first
    let inv = inv_mod(lead as i128, p).expect("unit");
    let c0 = (tau % p) as u128 * inv as u128 % p as u128;
    let c1 = (p - free) as u128 % p as u128 * inv as u128 % p as u128;
    let lin = FpPoly::new(vec![c0 as u64, c1 as u64], p);
    let d = g.total_degree().unwrap_or(0) as usize;
    let mut powers = vec![FpPoly::new(vec![1], p)];
    for i in 1..=d {
        powers.push(powers[i - 1].mul(&lin));
    }
    let mut acc = FpPoly::new(vec![(p - reduce(k, p)) % p], p);
    for (e, c) in g.terms() {
        let mut mono = vec![0u64; e[0] as usize + 1];
        mono[e[0] as usize] = reduce(c, p);
        let t = FpPoly::new(mono, p).mul(&powers[e[1] as usize]);
        acc = acc.add(&t);
    }
    Ok(acc.is_zero())
}

/// Every `tau` in `F_p` for which the line `Mx + Ny = tau` lies in `f = k` mod `p`.
pub fn lines_mod_p(f: &MPoly, k: &BigInt, m: &BigInt, n: &BigInt, p: u64) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for tau in 0..p {
        if line_in_curve_mod_p(f, k, m, n, tau, p)? {
            out.push(tau);
        }
    }
    Ok(out)
}

/// Largest `H` accepted by [`phi_partial_sum`].
pub const PHI_SUM_LIMIT: u64 = 1 << 20;

/// `sum_{1 <= h <= H} |Phi(h; M, N)| / h^(2 - 1/d + eps)` with the comparison value
/// `|Delta_f|^eps H^eps` when a certificate exists.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiPartialSum {
    pub h_max: u64,
    pub epsilon: f64,
    pub exponent: f64,
    pub value: f64,
    pub comparison: Option<f64>,
}

pub fn phi_partial_sum(
    inst: &GeneralInstance,
    engine: &PhiEngine,
    m: &BigInt,
    n: &BigInt,
    h_max: u64,
    epsilon: f64,
) -> Result<PhiPartialSum> {
    if h_max == 0 {
        return Err(Error::domain("H must be positive"));
    }
    if h_max > PHI_SUM_LIMIT {
        return Err(Error::Budget(format!("H = {h_max} exceeds {PHI_SUM_LIMIT}")));
    }
    let d = inst.degree() as f64;
    let exponent = 2.0 - 1.0 / d + epsilon;
    let mut value = 0.0;
    for h in 1..=h_max {
        value += engine.phi(h, m, n)?.abs() / (h as f64).powf(exponent);
    }
    let comparison = if m.is_zero() && n.is_zero() {
        None
    } else {
        delta_f(&inst.f, &inst.k, m, n).ok().map(|c| {
            let log_delta = c.value.abs().to_f64().unwrap_or(f64::INFINITY).ln();
            (epsilon * (log_delta + (h_max as f64).ln())).exp()
        })
    };
    Ok(PhiPartialSum {
        h_max,
        epsilon,
        exponent,
        value,
        comparison,
    })
}

/// `Phi(p^l; 0, 0)` against `p^(2l-2)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HigherPowerRow {
    pub p: u64,
    pub l: u32,
    pub count: u64,
    pub ratio: f64,
}

/// Moduli beyond which a non-separable solution set is not enumerated.
pub const HIGHER_POWER_LIMIT: u64 = 1 << 12;

/// Rows for `2 <= l <= d` and every listed prime.
pub fn higher_power_rows(inst: &GeneralInstance, engine: &PhiEngine, primes: &[u64]) -> Result<Vec<HigherPowerRow>> {
    let d = inst.degree();
    let mut rows = Vec::new();
    for &p in primes {
        if !is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        for l in 2..=d {
            let q = p
                .checked_pow(l)
                .filter(|&q| q < 1 << 31)
                .ok_or_else(|| Error::Budget(format!("{p}^{l} is too large")))?;
            if !engine.is_separable() && q > HIGHER_POWER_LIMIT {
                return Err(Error::Budget(format!("{q}^2 residue pairs to enumerate")));
            }
            let count = engine.solutions(q).len() as u64;
            let ratio = count as f64 / (p as f64).powi(2 * l as i32 - 2);
            rows.push(HigherPowerRow { p, l, count, ratio });
        }
    }
    Ok(rows)
}
