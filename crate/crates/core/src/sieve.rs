//! The polynomial sieve for one value of `h`: coefficient tables `c_{i,j}(alpha)`, the sums
//! `S_{i,j}(p,q)` by direct scan and by completion with `Gamma(B,m)`, the sieve bound, and
//! the exponent bookkeeping for the final estimates.

use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::energy::GeneralInstance;
use crate::error::{Error, Result};
use crate::ffield::{
    build_sieve_surface, inv_mod, is_prime, primes_up_to, psi_sum_direct, psi_sum_factorized,
    sigma_t, PhiEngine, SieveSurface,
};
use crate::geometry::{singular_census, Family};
use crate::polyarith::{binary_form_discriminant, integer_roots};
use crate::ser::{ser_bigint, ser_display};

/// `c_{i,j}`, indexed `[i][j]`.
pub type CTable = [[i64; 3]; 3];

/// The coefficient table exactly as displayed with the sieve inequality.
pub fn c_table(alpha: i64, d: u32) -> CTable {
    let d = d as i64;
    let c00 = (alpha - d) * (alpha - d);
    let c10 = alpha + (alpha - 1) * d - d * d;
    let c11 = (1 + d) * (1 + d);
    let c20 = -alpha - d;
    let c21 = -1 - d;
    [[c00, c10, c20], [c10, c11, c21], [c20, c21, 1]]
}

/// `u_i u_j` with `u = (alpha - d, 1 + d, -1)`, so that `sum c_{i,j} v^i w^j` factors as
/// `W(v) W(w)` with `W(v) = alpha - (v - 1)(v - d)`.
pub fn c_table_product(alpha: i64, d: u32) -> CTable {
    let d = d as i64;
    let u = [alpha - d, 1 + d, -1];
    let mut out = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = u[i] * u[j];
        }
    }
    out
}

/// `sum_{i,j} c_{i,j} max(1,i) max(1,j)`, the coefficient of the main term.
pub fn main_term_weight(t: &CTable) -> i64 {
    let w = [1, 1, 2];
    (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| t[i][j] * w[i] * w[j]).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableForm {
    Display,
    Product,
}

impl TableForm {
    pub fn table(self, alpha: i64, d: u32) -> CTable {
        match self {
            TableForm::Display => c_table(alpha, d),
            TableForm::Product => c_table_product(alpha, d),
        }
    }
}

impl FromStr for TableForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "display" => Ok(TableForm::Display),
            "product" => Ok(TableForm::Product),
            _ => Err(Error::domain(format!("unknown table form `{s}` (display or product)"))),
        }
    }
}

/// `Gamma(B, m) = sum_{1 <= l <= B} e(-m l / modulus)` in closed form.
pub fn gamma_b(bound: u64, m: i64, modulus: u64) -> Complex64 {
    let r = m.rem_euclid(modulus as i64);
    if r == 0 {
        return Complex64::new(bound as f64, 0.0);
    }
    let theta = -std::f64::consts::TAU * r as f64 / modulus as f64;
    let ratio = (bound as f64 * theta / 2.0).sin() / (theta / 2.0).sin();
    Complex64::from_polar(ratio, theta * (bound as f64 + 1.0) / 2.0)
}

/// Largest `|A|` kept as an explicit coordinate list.
pub const MATERIALIZE_LIMIT: u64 = 10_000_000;
/// Largest box area a direct scan will visit.
pub const DIRECT_SCAN_LIMIT: u128 = 1 << 34;
/// Largest modulus `pq|h|` for the completed sums.
pub const COMPLETION_LIMIT: u64 = 4096;
/// Largest `|h|` handled; the residue mask has `h^2` entries.
pub const H_LIMIT: u64 = 4096;

/// `{(X1, X2) in [1,B]^2 : (2ab)^(d-1) f = (2ab)^(d-1) k mod |h|}`, stored as a residue mask.
#[derive(Clone, Debug)]
pub struct AdmissibleSet {
    pub bound: u64,
    pub modulus: u64,
    mask: Vec<bool>,
}

impl AdmissibleSet {
    pub fn new(surface: &SieveSurface, bound: u64) -> Result<Self> {
        let modulus = surface
            .h
            .abs()
            .to_u64()
            .filter(|&h| h <= H_LIMIT)
            .ok_or_else(|| Error::Budget(format!("|h| above {H_LIMIT}")))?;
        Ok(AdmissibleSet {
            bound,
            modulus,
            mask: surface.congruence_mask(modulus),
        })
    }

    pub fn contains(&self, x1: u64, x2: u64) -> bool {
        let m = self.modulus;
        (1..=self.bound).contains(&x1)
            && (1..=self.bound).contains(&x2)
            && self.mask[((x1 % m) * m + x2 % m) as usize]
    }

    /// Number of `X` in `[1,B]` in each residue class mod `|h|`.
    fn class_sizes(&self) -> Vec<u64> {
        let m = self.modulus;
        (0..m)
            .map(|r| {
                let first = if r == 0 { m } else { r };
                if first > self.bound {
                    0
                } else {
                    (self.bound - first) / m + 1
                }
            })
            .collect()
    }

    pub fn count(&self) -> u64 {
        let m = self.modulus;
        let sizes = self.class_sizes();
        let mut total = 0;
        for r in 0..m {
            for s in 0..m {
                if self.mask[(r * m + s) as usize] {
                    total += sizes[r as usize] * sizes[s as usize];
                }
            }
        }
        total
    }

    /// The `X2` with `(x1, X2)` in the set, increasing.
    pub fn row(&self, x1: u64) -> impl Iterator<Item = u64> + '_ {
        let m = self.modulus;
        let base = ((x1 % m) * m) as usize;
        (1..=self.bound).filter(move |&x2| self.mask[base + (x2 % m) as usize])
    }

    /// Sorted coordinate list, when the set has at most `MATERIALIZE_LIMIT` points.
    pub fn materialize(&self) -> Option<Vec<(u64, u64)>> {
        if self.count() > MATERIALIZE_LIMIT {
            return None;
        }
        Some((1..=self.bound).flat_map(|x1| self.row(x1).map(move |x2| (x1, x2))).collect())
    }
}

/// One value of `h` with its sieving primes and the set `A`.
#[derive(Clone, Debug)]
pub struct SieveContext {
    pub inst: GeneralInstance,
    pub h: BigInt,
    pub q_limit: u64,
    pub alpha: i64,
    /// Primes `p <= Q` not dividing `exclusion`.
    pub primes: Vec<u64>,
    /// `6ab g_{d-1}(b,a) cont(f_d) Disc[f_d] h` times the `K` and `P` census values at `h`.
    pub exclusion: BigInt,
    pub surface: SieveSurface,
    pub set: AdmissibleSet,
}

/// The product whose prime divisors are removed from the sieving set.
pub fn exclusion_product(inst: &GeneralInstance, h: &BigInt) -> Result<BigInt> {
    let d = inst.degree();
    let top = inst.f.homogeneous_part(d);
    let gtop = inst.g.homogeneous_part(d - 1);
    let big_g = gtop.eval(&[inst.b.clone(), inst.a.clone()]);
    let mut out = BigInt::from(6) * &inst.a * &inst.b * big_g * top.content();
    out *= binary_form_discriminant(&top)?;
    out *= h;
    let range = h.abs().to_u64().unwrap_or(1).max(1);
    for family in [Family::K, Family::P] {
        let census = singular_census(inst, family, range)?;
        out *= census.disc_polynomial.eval(h) * &census.bad_divisor;
    }
    Ok(out)
}

impl SieveContext {
    /// Builds the context for `h`; the sieve itself is restricted to `d` in `{3, 4}`.
    pub fn new(inst: &GeneralInstance, h: &BigInt, q_limit: u64, alpha: i64) -> Result<Self> {
        let d = inst.degree();
        if !(3..=4).contains(&d) {
            return Err(Error::domain("the sieve is set up for deg f in {3, 4}"));
        }
        if alpha < 1 {
            return Err(Error::domain("alpha must be at least 1"));
        }
        let surface = build_sieve_surface(inst, h)?;
        let set = AdmissibleSet::new(&surface, inst.bound)?;
        let exclusion = exclusion_product(inst, h)?;
        let primes = if exclusion.is_zero() {
            Vec::new()
        } else {
            primes_up_to(q_limit)
                .into_iter()
                .filter(|&p| !(&exclusion % BigInt::from(p)).is_zero())
                .collect()
        };
        Ok(SieveContext {
            inst: inst.clone(),
            h: h.clone(),
            q_limit,
            alpha,
            primes,
            exclusion,
            surface,
            set,
        })
    }

    pub fn bound(&self) -> u64 {
        self.inst.bound
    }

    pub fn h_abs(&self) -> u64 {
        self.set.modulus
    }

    fn check_pair(&self, p: u64, q: u64) -> Result<()> {
        for r in [p, q] {
            if !is_prime(r) {
                return Err(Error::domain(format!("{r} is not prime")));
            }
            if self.h_abs() % r == 0 {
                return Err(Error::domain(format!("{r} divides h")));
            }
        }
        Ok(())
    }
}

/// The largest prime allowed by the balancing choice `Q = B^(1/(3d))`.
pub fn balanced_sieve_limit(bound: u64, d: u32) -> u64 {
    let e = 3 * d;
    let mut q = 1u64;
    while (q + 1).checked_pow(e).is_some_and(|v| v <= bound) {
        q += 1;
    }
    q
}

type SumTable = [[u128; 3]; 3];

fn powers_table(hist: &[Vec<u64>]) -> SumTable {
    let mut out = [[0u128; 3]; 3];
    for (a, row) in hist.iter().enumerate() {
        for (b, &n) in row.iter().enumerate() {
            if n == 0 {
                continue;
            }
            let (a, b) = (a as u128, b as u128);
            let pa = [1, a, a * a];
            let pb = [1, b, b * b];
            for i in 0..3 {
                for j in 0..3 {
                    out[i][j] += n as u128 * pa[i] * pb[j];
                }
            }
        }
    }
    out
}

/// All nine `S_{i,j}(p,q)` by scanning `A`.
pub fn s_direct_table(ctx: &SieveContext, p: u64, q: u64) -> Result<SumTable> {
    ctx.check_pair(p, q)?;
    let b = ctx.bound();
    if (b as u128) * (b as u128) > DIRECT_SCAN_LIMIT {
        return Err(Error::Budget(format!("B^2 above {DIRECT_SCAN_LIMIT}")));
    }
    let vp = ctx.surface.v_table(p);
    let vq = ctx.surface.v_table(q);
    Ok(direct_from_tables(ctx, p, &vp, q, &vq))
}

fn direct_from_tables(ctx: &SieveContext, p: u64, vp: &[u32], q: u64, vq: &[u32]) -> SumTable {
    let width = (p.max(q) + 1) as usize;
    let hist = (1..=ctx.bound())
        .into_par_iter()
        .fold(
            || vec![vec![0u64; width]; width],
            |mut acc, x1| {
                for x2 in ctx.set.row(x1) {
                    let a = vp[((x1 % p) * p + x2 % p) as usize] as usize;
                    let c = vq[((x1 % q) * q + x2 % q) as usize] as usize;
                    acc[a][c] += 1;
                }
                acc
            },
        )
        .reduce(
            || vec![vec![0u64; width]; width],
            |mut a, b| {
                for (ra, rb) in a.iter_mut().zip(b) {
                    for (x, y) in ra.iter_mut().zip(rb) {
                        *x += y;
                    }
                }
                a
            },
        );
    powers_table(&hist)
}

/// `S_{i,j}(p,q) = sum over A of v_p^i v_q^j`.
pub fn s_ij_direct(ctx: &SieveContext, i: usize, j: usize, p: u64, q: u64) -> Result<u128> {
    check_index(i, j)?;
    Ok(s_direct_table(ctx, p, q)?[i][j])
}

fn check_index(i: usize, j: usize) -> Result<()> {
    if i > 2 || j > 2 {
        return Err(Error::domain("i and j must lie in {0, 1, 2}"));
    }
    Ok(())
}

fn to_complex(v: &crate::ffield::ExpSumValue) -> Complex64 {
    Complex64::new(v.re, v.im)
}

/// `Sigma_t(p; M, N)` for `t <= 4` and every `M, N` mod `p`, indexed `[t][M * p + N]`.
fn sigma_grid(p: u64, surface: &SieveSurface) -> Result<Vec<Vec<Complex64>>> {
    (0..5u32)
        .map(|t| {
            (0..p * p)
                .map(|mn| {
                    let v = sigma_t(t, p, &BigInt::from(mn / p), &BigInt::from(mn % p), surface)?;
                    Ok(to_complex(&v))
                })
                .collect()
        })
        .collect()
}

/// `Phi(|h|; M, N)` for every `M, N` mod `|h|`, indexed `M * |h| + N`.
fn phi_grid(h: u64, engine: &PhiEngine) -> Result<Vec<Complex64>> {
    (0..h * h)
        .map(|mn| Ok(to_complex(&engine.phi(h, &BigInt::from(mn / h), &BigInt::from(mn % h))?)))
        .collect()
}

/// `Psi_{i,j}(m, n)` for all `-L/2 < m, n <= L/2`, `L = pq|h|`, assembled from `Sigma` and
/// `Phi` grids. Indexed `[3i + j][(m - m_lo) * L + (n - m_lo)]`.
struct PsiGrid {
    modulus: u64,
    lo: i64,
    values: Vec<Vec<Complex64>>,
}

fn psi_grid(ctx: &SieveContext, p: u64, q: u64, engine: &PhiEngine) -> Result<PsiGrid> {
    let h = ctx.h_abs();
    let l = p * q * h;
    let lo = (l / 2) as i64 - l as i64 + 1;
    let sp = sigma_grid(p, &ctx.surface)?;
    let sq = if q == p { sp.clone() } else { sigma_grid(q, &ctx.surface)? };
    let ph = phi_grid(h, engine)?;
    let md = |x: i64, m: u64| x.rem_euclid(m as i64) as u64;
    let size = (l * l) as usize;
    let mut values = vec![vec![Complex64::zero(); size]; 9];
    if p != q {
        let pq = p * q;
        let hbar = inv_mod(h as i128, pq).expect("coprime") as i64;
        let pqbar = inv_mod(pq as i128, h).expect("coprime") as i64;
        let qp = inv_mod(q as i128, p).expect("distinct primes") as i64;
        let pp = inv_mod(p as i128, q).expect("distinct primes") as i64;
        let cp = (hbar * qp) % p as i64;
        let cq = (hbar * pp) % q as i64;
        for a in 0..l as i64 {
            let m = lo + a;
            for b in 0..l as i64 {
                let n = lo + b;
                let ip = (md(cp * m, p) * p + md(cp * n, p)) as usize;
                let iq = (md(cq * m, q) * q + md(cq * n, q)) as usize;
                let ih = (md(pqbar * m, h) * h + md(pqbar * n, h)) as usize;
                let idx = (a * l as i64 + b) as usize;
                let f = ph[ih];
                for i in 0..3 {
                    for j in 0..3 {
                        values[3 * i + j][idx] = sp[i][ip] * sq[j][iq] * f;
                    }
                }
            }
        }
    } else {
        let hbar = inv_mod(h as i128, p).expect("coprime") as i64;
        let pbar = inv_mod(p as i128, h).expect("coprime") as i64;
        let p2 = (p * p) as f64;
        for a in 0..l as i64 {
            let m = lo + a;
            if m % p as i64 != 0 {
                continue;
            }
            for b in 0..l as i64 {
                let n = lo + b;
                if n % p as i64 != 0 {
                    continue;
                }
                let (m1, n1) = (m / p as i64, n / p as i64);
                let ip = (md(hbar * m1, p) * p + md(hbar * n1, p)) as usize;
                let ih = (md(pbar * m1, h) * h + md(pbar * n1, h)) as usize;
                let idx = (a * l as i64 + b) as usize;
                for i in 0..3 {
                    for j in 0..3 {
                        values[3 * i + j][idx] = sp[i + j][ip] * ph[ih] * p2;
                    }
                }
            }
        }
    }
    Ok(PsiGrid { modulus: l, lo, values })
}

impl PsiGrid {
    fn get(&self, k: usize, m: i64, n: i64) -> Complex64 {
        let l = self.modulus as i64;
        let a = (m - self.lo).rem_euclid(l);
        let b = (n - self.lo).rem_euclid(l);
        self.values[k][(a * l + b) as usize]
    }
}

/// Frequencies at which assembled `Psi` values are compared with the direct sum and with
/// the factorization from `ffield` before use.
fn check_frequencies(l: u64) -> Vec<(i64, i64)> {
    let l = l as i64;
    let half = l / 2;
    vec![(0, 0), (1, 0), (0, 1), (1, 2), (-3, 5), (half, 1 - half), (l / 3, -(l / 5))]
}

fn verify_psi_grid(ctx: &SieveContext, p: u64, q: u64, grid: &PsiGrid, engine: &PhiEngine) -> Result<()> {
    let l = grid.modulus;
    let tol = 1e-6 * (l as f64) * (l as f64);
    for (m, n) in check_frequencies(l) {
        let (mb, nb) = (BigInt::from(m), BigInt::from(n));
        let direct = psi_sum_direct(&mb, &nb, p, q, &ctx.surface)?;
        for i in 0..3u32 {
            for j in 0..3u32 {
                let fac = psi_sum_factorized(i, j, &mb, &nb, p, q, &ctx.surface, engine)?;
                let dv = to_complex(&direct[i as usize][j as usize]);
                let g = grid.get((3 * i + j) as usize, m, n);
                if (to_complex(&fac) - dv).norm() > tol || (g - dv).norm() > tol {
                    return Err(Error::invariant(format!(
                        "Psi factorization fails at p={p}, q={q}, (m,n)=({m},{n}), (i,j)=({i},{j})"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// All nine `S_{i,j}(p,q)` from the completed form
/// `(pq|h|)^(-2) sum_{m,n} Gamma(B,m) Gamma(B,n) Psi_{i,j}(m,n)`.
pub fn s_completed_table(ctx: &SieveContext, p: u64, q: u64) -> Result<[[Complex64; 3]; 3]> {
    ctx.check_pair(p, q)?;
    let l = p * q * ctx.h_abs();
    if l > COMPLETION_LIMIT {
        return Err(Error::Budget(format!("pq|h| = {l} above {COMPLETION_LIMIT}")));
    }
    let engine = PhiEngine::new(&ctx.inst);
    let grid = psi_grid(ctx, p, q, &engine)?;
    verify_psi_grid(ctx, p, q, &grid, &engine)?;
    let b = ctx.bound();
    let gam: Vec<Complex64> = (0..l as i64).map(|a| gamma_b(b, grid.lo + a, l)).collect();
    let mut out = [[Complex64::zero(); 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let vals = &grid.values[3 * i + j];
            let total: Complex64 = (0..l as usize)
                .into_par_iter()
                .map(|a| {
                    let mut acc = Complex64::zero();
                    for (c, g) in gam.iter().enumerate() {
                        acc += g * vals[a * l as usize + c];
                    }
                    acc * gam[a]
                })
                .reduce(Complex64::zero, |x, y| x + y);
            *cell = total / (l as f64 * l as f64);
        }
    }
    Ok(out)
}

/// `S_{i,j}(p,q)` from the completed form; the imaginary part is dropped.
pub fn s_ij_completed(ctx: &SieveContext, i: usize, j: usize, p: u64, q: u64) -> Result<f64> {
    check_index(i, j)?;
    Ok(s_completed_table(ctx, p, q)?[i][j].re)
}

/// `Sum_{x,y mod p} v_p^t` for `t <= 4`.
fn moment_sums(v: &[u32]) -> [u128; 5] {
    let mut out = [0u128; 5];
    for &x in v {
        let mut pw = 1u128;
        for o in out.iter_mut() {
            *o += pw;
            pw *= x as u128;
        }
    }
    out
}

/// `Psi_{i,j}(0, 0)`: an exact count of residue pairs mod `pq|h|` weighted by
/// `v_p^i v_q^j`, split through the Chinese remainder theorem.
pub fn psi_at_origin(ctx: &SieveContext, p: u64, q: u64) -> Result<SumTable> {
    ctx.check_pair(p, q)?;
    let mp = moment_sums(&ctx.surface.v_table(p));
    let phi0 = phi_at_origin(ctx);
    let mut out = [[0u128; 3]; 3];
    if p != q {
        let mq = moment_sums(&ctx.surface.v_table(q));
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = mp[i] * mq[j] * phi0;
            }
        }
    } else {
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = (p * p) as u128 * mp[i + j] * phi0;
            }
        }
    }
    Ok(out)
}

/// `Phi(|h|; 0, 0)`, the number of residue pairs in the congruence mask.
pub fn phi_at_origin(ctx: &SieveContext) -> u128 {
    ctx.surface.congruence_mask(ctx.h_abs()).iter().filter(|&&b| b).count() as u128
}

/// `L_{i,j}(p,q) = Gamma(B,0)^2 Psi_{i,j}(0,0) / (pq|h|)^2`.
pub fn main_terms(ctx: &SieveContext, p: u64, q: u64) -> Result<[[f64; 3]; 3]> {
    let psi0 = psi_at_origin(ctx, p, q)?;
    let l = (p * q * ctx.h_abs()) as f64;
    let b = ctx.bound() as f64;
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = b * b * psi0[i][j] as f64 / (l * l);
        }
    }
    Ok(out)
}

/// `sum c_{i,j} L_{i,j}(p,q)` divided by `B^2 Phi(|h|;0,0) / h^2`.
pub fn main_term_coefficient(ctx: &SieveContext, p: u64, q: u64, table: &CTable) -> Result<f64> {
    let psi0 = psi_at_origin(ctx, p, q)?;
    let phi0 = phi_at_origin(ctx);
    if phi0 == 0 {
        return Ok(0.0);
    }
    let mut acc = BigInt::zero();
    for i in 0..3 {
        for j in 0..3 {
            acc += BigInt::from(table[i][j]) * BigInt::from(psi0[i][j]);
        }
    }
    let denom = BigInt::from(p * q) * BigInt::from(p * q) * BigInt::from(phi0);
    let r = BigRational::new(acc, denom);
    Ok(r.to_f64().unwrap_or(f64::NAN))
}

fn weighted(table: &CTable, s: &SumTable) -> i128 {
    let mut acc = 0i128;
    for i in 0..3 {
        for j in 0..3 {
            acc += table[i][j] as i128 * s[i][j] as i128;
        }
    }
    acc
}

#[derive(Clone, Debug, Serialize)]
pub struct PairSums {
    pub p: u64,
    pub q: u64,
    /// `S_{i,j}(p,q)`.
    pub s: [[u64; 3]; 3],
    /// `sum c_{i,j}(alpha) S_{i,j}(p,q)`.
    pub inner: i64,
    /// `sum c_{i,j}(alpha) L_{i,j}(p,q)`.
    pub main: f64,
    /// `inner - main`: the contribution of `(m, n) != (0, 0)`.
    pub remainder: f64,
    /// `main` divided by `B^2 Phi(|h|;0,0)/h^2`.
    pub main_coefficient: f64,
    /// The same coefficient with `alpha = 0`.
    pub reference_coefficient: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SieveReport {
    #[serde(serialize_with = "ser_bigint")]
    pub h: BigInt,
    #[serde(rename = "Q")]
    pub q_limit: u64,
    pub alpha: i64,
    pub form: TableForm,
    pub bound: u64,
    pub primes: Vec<u64>,
    pub set_size: u64,
    /// Points of `A` where the detection polynomial has an integer root.
    pub lhs: u64,
    /// `(1/#P^2) sum_{p,q} |sum c_{i,j}(alpha) S_{i,j}(p,q)|`.
    pub rhs: f64,
    /// `lhs / rhs`, absent when `rhs = 0`.
    pub ratio: Option<f64>,
    /// `sqrt(X1^2 + X2^2) <= exp(#P)` on all of `A`.
    pub size_condition: bool,
    /// `sum c_{i,j} max(1,i) max(1,j)` for the table in use.
    pub main_weight: i64,
    /// Mean of `main` over all pairs, and the same with `alpha = 0`.
    pub main_mean: f64,
    pub reference_main_mean: f64,
    pub pairs: Vec<PairSums>,
    #[serde(serialize_with = "ser_display")]
    pub exclusion: BigInt,
}

/// Points of `A` whose detection polynomial `K_h(X1, X2, x, 1)` has an integer root.
pub fn sieve_lhs(ctx: &SieveContext) -> Result<u64> {
    let b = ctx.bound();
    if (b as u128) * (b as u128) > DIRECT_SCAN_LIMIT {
        return Err(Error::Budget(format!("B^2 above {DIRECT_SCAN_LIMIT}")));
    }
    let tables: Vec<(u64, Vec<u32>)> = ctx.primes.iter().map(|&p| (p, ctx.surface.v_table(p))).collect();
    let count = (1..=b)
        .into_par_iter()
        .map(|x1| {
            let mut n = 0u64;
            for x2 in ctx.set.row(x1) {
                if tables.iter().any(|(p, v)| v[((x1 % p) * p + x2 % p) as usize] == 0) {
                    continue;
                }
                let f = ctx.surface.detection_poly(&BigInt::from(x1), &BigInt::from(x2));
                match integer_roots(&f) {
                    None => n += 1,
                    Some(r) if !r.is_empty() => n += 1,
                    _ => {}
                }
            }
            n
        })
        .sum();
    Ok(count)
}

/// The sieve bound over all ordered pairs of sieving primes.
pub fn sieve_bound(ctx: &SieveContext, form: TableForm) -> Result<SieveReport> {
    if ctx.primes.is_empty() {
        return Err(Error::domain("no sieving primes: raise Q or pick a smooth h"));
    }
    let b = ctx.bound();
    if (b as u128) * (b as u128) > DIRECT_SCAN_LIMIT {
        return Err(Error::Budget(format!("B^2 above {DIRECT_SCAN_LIMIT}")));
    }
    let d = ctx.inst.degree();
    let table = form.table(ctx.alpha, d);
    let reference = form.table(0, d);
    let tables: Vec<Vec<u32>> = ctx.primes.par_iter().map(|&p| ctx.surface.v_table(p)).collect();
    let idx: Vec<(usize, usize)> = (0..ctx.primes.len())
        .flat_map(|a| (0..ctx.primes.len()).map(move |c| (a, c)))
        .collect();
    let pairs: Vec<PairSums> = idx
        .par_iter()
        .map(|&(a, c)| -> Result<PairSums> {
            let (p, q) = (ctx.primes[a], ctx.primes[c]);
            let s = direct_from_tables(ctx, p, &tables[a], q, &tables[c]);
            let inner = weighted(&table, &s);
            let lt = main_terms(ctx, p, q)?;
            let main: f64 = (0..3)
                .flat_map(|i| (0..3).map(move |j| (i, j)))
                .map(|(i, j)| table[i][j] as f64 * lt[i][j])
                .sum();
            let mut su = [[0u64; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    su[i][j] = u64::try_from(s[i][j]).map_err(|_| Error::invariant("S_{i,j} overflow"))?;
                }
            }
            let inner = i64::try_from(inner).map_err(|_| Error::invariant("inner sum overflow"))?;
            Ok(PairSums {
                p,
                q,
                s: su,
                inner,
                main,
                remainder: inner as f64 - main,
                main_coefficient: main_term_coefficient(ctx, p, q, &table)?,
                reference_coefficient: main_term_coefficient(ctx, p, q, &reference)?,
            })
        })
        .collect::<Result<_>>()?;
    let n2 = (ctx.primes.len() * ctx.primes.len()) as f64;
    let rhs = pairs.iter().map(|e| (e.inner as f64).abs()).sum::<f64>() / n2;
    let lhs = sieve_lhs(ctx)?;
    let ratio = (rhs > 0.0).then(|| lhs as f64 / rhs);
    let phi0 = phi_at_origin(ctx) as f64;
    let h2 = (ctx.h_abs() as f64).powi(2);
    let norm = (b as f64).powi(2) * phi0 / h2;
    let main_mean = pairs.iter().map(|e| e.main).sum::<f64>() / n2;
    let reference_main_mean = pairs.iter().map(|e| e.reference_coefficient).sum::<f64>() * norm / n2;
    Ok(SieveReport {
        h: ctx.h.clone(),
        q_limit: ctx.q_limit,
        alpha: ctx.alpha,
        form,
        bound: b,
        primes: ctx.primes.clone(),
        set_size: ctx.set.count(),
        lhs,
        rhs,
        ratio,
        size_condition: std::f64::consts::SQRT_2 * b as f64 <= (ctx.primes.len() as f64).exp(),
        main_weight: main_term_weight(&table),
        main_mean,
        reference_main_mean,
        pairs,
        exclusion: ctx.exclusion.clone(),
    })
}

/// Exponent bookkeeping for degree `d`.
#[derive(Clone, Debug, Serialize)]
pub struct ExponentSummary {
    pub d: u32,
    /// `2 - 1/(50d)`.
    pub target: f64,
    /// `2 - 1/(3d)`, the sieve exponent (used for `d` in `{3, 4}`).
    pub sieve_exponent: f64,
    #[serde(serialize_with = "ser_display")]
    pub sieve_exponent_exact: BigRational,
    /// `1 + max(1/2, 2/sqrt(d) + 1/(d-1) - 1/((d-2) sqrt(d)))` (used for `d >= 5`).
    pub determinant_exponent: f64,
    pub sieve_applies: bool,
    pub determinant_applies: bool,
    pub sieve_below_target: bool,
    pub determinant_below_target: bool,
    /// The `delta` with `Q = B^delta` equating the exponents of `Q^2 B^(2-1/d)` and `B^2/Q`.
    #[serde(serialize_with = "ser_display")]
    pub balance_delta: BigRational,
    #[serde(serialize_with = "ser_display")]
    pub balance_exponent: BigRational,
    /// `balance_delta = 1/(3d)` and `balance_exponent = 2 - 1/(3d)`, exactly.
    pub balance_holds: bool,
}

impl ExponentSummary {
    /// Every exponent that applies at this degree is below the target, and the balance holds.
    pub fn verified(&self) -> bool {
        (!self.sieve_applies || self.sieve_below_target)
            && (!self.determinant_applies || self.determinant_below_target)
            && self.balance_holds
    }
}

pub fn determinant_exponent(d: u32) -> f64 {
    let df = d as f64;
    let s = df.sqrt();
    1.0 + f64::max(0.5, 2.0 / s + 1.0 / (df - 1.0) - 1.0 / ((df - 2.0) * s))
}

pub fn exponent_calculator(d: u32) -> Result<ExponentSummary> {
    if d < 3 {
        return Err(Error::domain("d must be at least 3"));
    }
    let r = |n: i64, m: i64| BigRational::new(BigInt::from(n), BigInt::from(m));
    let two = r(2, 1);
    let inv_d = r(1, d as i64);
    let sieve_exact = &two - r(1, 3 * d as i64);
    // Q^2 B^(2 - 1/d) against B^2 / Q: 2 delta + 2 - 1/d = 2 - delta
    let first_const = &two - &inv_d;
    let delta = (&two - &first_const) / r(3, 1);
    let left = &delta * r(2, 1) + &first_const;
    let right = &two - &delta;
    let balance_holds = left == right && delta == r(1, 3 * d as i64) && right == sieve_exact;
    let target = 2.0 - 1.0 / (50.0 * d as f64);
    let sieve_exponent = sieve_exact.to_f64().unwrap_or(f64::NAN);
    let det = determinant_exponent(d);
    Ok(ExponentSummary {
        d,
        target,
        sieve_exponent,
        sieve_exponent_exact: sieve_exact,
        determinant_exponent: det,
        sieve_applies: d <= 4,
        determinant_applies: d >= 5,
        sieve_below_target: sieve_exponent < target,
        determinant_below_target: det < target,
        balance_delta: delta,
        balance_exponent: right,
        balance_holds,
    })
}
