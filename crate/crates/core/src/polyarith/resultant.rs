//! Sylvester resultants, discriminants and parametric discriminants.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::multi::MPoly;
use super::rat::RatPoly1;
use super::uni::IntPoly1;
use crate::error::{Error, Result};

/// Determinant by fraction-free (Bareiss) elimination with row pivoting.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = !sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// Determinant over the rationals by Gaussian elimination.
pub fn rational_det(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for k in 0..n {
        let Some(r) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return BigRational::zero();
        };
        if r != k {
            m.swap(k, r);
            det = -det;
        }
        let piv = m[k][k].clone();
        det *= &piv;
        for i in k + 1..n {
            if m[i][k].is_zero() {
                continue;
            }
            let f = &m[i][k] / &piv;
            for j in k..n {
                let t = &f * &m[k][j];
                m[i][j] -= t;
            }
        }
    }
    det
}

/// Sylvester matrix of `f` and `g` taken with formal degrees `df`, `dg`.
pub fn sylvester(f: &IntPoly1, df: usize, g: &IntPoly1, dg: usize) -> Vec<Vec<BigInt>> {
    let n = df + dg;
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for r in 0..dg {
        for i in 0..=df {
            m[r][r + i] = f.coeff(df - i);
        }
    }
    for r in 0..df {
        for i in 0..=dg {
            m[dg + r][r + i] = g.coeff(dg - i);
        }
    }
    m
}

/// Resultant with formal degrees (coefficients past the true degree are zero).
pub fn resultant_formal(f: &IntPoly1, df: usize, g: &IntPoly1, dg: usize) -> BigInt {
    if df + dg == 0 {
        return BigInt::one();
    }
    bareiss_det(sylvester(f, df, g, dg))
}

/// Resultant of two nonzero polynomials at their true degrees.
pub fn resultant(f: &IntPoly1, g: &IntPoly1) -> Result<BigInt> {
    let df = f.degree().ok_or(Error::ZeroPolynomial)?;
    let dg = g.degree().ok_or(Error::ZeroPolynomial)?;
    Ok(resultant_formal(f, df, g, dg))
}

/// Discriminant `(-1)^{d(d-1)/2} Res(f, f') / a_d`.
pub fn discriminant(f: &IntPoly1) -> Result<BigInt> {
    let d = f.degree().ok_or(Error::ZeroPolynomial)?;
    if d == 0 {
        return Err(Error::domain("discriminant of a constant"));
    }
    let r = resultant_formal(f, d, &f.derivative(), d - 1);
    let (q, rem) = num_integer::Integer::div_rem(&r, &f.lc());
    if !rem.is_zero() {
        return Err(Error::invariant("leading coefficient does not divide the resultant"));
    }
    Ok(if (d * (d - 1) / 2) % 2 == 1 { -q } else { q })
}

/// Discriminant of a binary form `F(x,y)` of degree `d`:
/// `lc^2 Disc(F(x,1))` when `F(x,1)` has degree `d-1`, zero when `y^2 | F`.
pub fn binary_form_discriminant(form: &MPoly) -> Result<BigInt> {
    let d = form.total_degree().ok_or(Error::ZeroPolynomial)? as usize;
    let dehom = form.slice(0, &[BigInt::zero(), BigInt::one()]);
    match dehom.degree() {
        Some(e) if e == d => discriminant(&dehom),
        Some(e) if e + 1 == d => {
            if e == 0 {
                return Ok(dehom.lc() * dehom.lc());
            }
            Ok(dehom.lc() * dehom.lc() * discriminant(&dehom)?)
        }
        _ => Ok(BigInt::zero()),
    }
}

/// Newton interpolation through `(xs[i], ys[i])`.
pub fn interpolate(xs: &[BigInt], ys: &[BigRational], var: &str) -> RatPoly1 {
    let n = xs.len();
    let xr: Vec<BigRational> = xs.iter().map(|x| BigRational::from_integer(x.clone())).collect();
    let mut c = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            c[i] = (&c[i] - &c[i - 1]) / (&xr[i] - &xr[i - j]);
        }
    }
    let mut p = RatPoly1::zero(var);
    for i in (0..n).rev() {
        let lin = RatPoly1::new(vec![-xr[i].clone(), BigRational::one()], var);
        p = &(&p * &lin) + &RatPoly1::constant(c[i].clone(), var);
    }
    p
}

/// Polynomial in a main variable whose coefficients are polynomials in a parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamPoly {
    /// `coeffs[i]` multiplies `var^i`; each is a polynomial in `param`.
    pub coeffs: Vec<IntPoly1>,
    pub param: String,
    pub var: String,
}

impl ParamPoly {
    pub fn new(mut coeffs: Vec<IntPoly1>, param: &str, var: &str) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let coeffs = coeffs.into_iter().map(|c| c.with_var(param)).collect();
        ParamPoly {
            coeffs,
            param: param.to_string(),
            var: var.to_string(),
        }
    }

    /// Reads a two-variable polynomial with the parameter at index `param_idx`.
    pub fn from_mpoly(p: &MPoly, var_idx: usize, param_idx: usize) -> Self {
        let n = p.degree_in(var_idx).map(|d| d as usize + 1).unwrap_or(0);
        let pd = p.degree_in(param_idx).unwrap_or(0) as usize;
        let mut rows = vec![vec![BigInt::zero(); pd + 1]; n];
        for (e, c) in p.terms() {
            rows[e[var_idx] as usize][e[param_idx] as usize] += c;
        }
        let param = p.vars()[param_idx].clone();
        let var = p.vars()[var_idx].clone();
        Self::new(
            rows.into_iter().map(|r| IntPoly1::new(r, &param)).collect(),
            &param,
            &var,
        )
    }

    /// Generic degree in the main variable.
    pub fn main_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Maximum parameter degree among the coefficients.
    pub fn param_degree(&self) -> usize {
        self.coeffs.iter().filter_map(|c| c.degree()).max().unwrap_or(0)
    }

    pub fn at(&self, t: &BigInt) -> IntPoly1 {
        IntPoly1::new(self.coeffs.iter().map(|c| c.eval(t)).collect(), &self.var)
    }

    /// Derivative in the main variable.
    pub fn derivative(&self) -> ParamPoly {
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale(&BigInt::from(i)))
            .collect();
        ParamPoly::new(v, &self.param, &self.var)
    }
}

/// Evaluates `op` at enough admissible integer parameter values and interpolates.
pub(crate) fn sample_and_interpolate<F>(bound: usize, admissible: impl Fn(&BigInt) -> bool, op: F, param: &str) -> Result<IntPoly1>
where
    F: Fn(&BigInt) -> Result<BigInt>,
{
    let mut xs = Vec::with_capacity(bound + 1);
    let mut ys = Vec::with_capacity(bound + 1);
    let mut t = BigInt::zero();
    let mut skipped = 0usize;
    while xs.len() < bound + 1 {
        if admissible(&t) {
            ys.push(BigRational::from_integer(op(&t)?));
            xs.push(t.clone());
        } else {
            skipped += 1;
            if skipped > 4 * bound + 64 {
                return Err(Error::domain("all sampled parameter values are degenerate"));
            }
        }
        // 0, 1, -1, 2, -2, ... keeps sample values small
        t = if t.is_positive() { -t } else { -t + 1 };
    }
    let p = interpolate(&xs, &ys, param);
    p.to_int().map(|q| q.with_var(param))
}

/// Discriminant of `f` in its main variable as an exact polynomial in the parameter.
pub fn disc_in_param(f: &ParamPoly) -> Result<IntPoly1> {
    let n = f.main_degree().ok_or(Error::ZeroPolynomial)?;
    if n == 0 {
        return Err(Error::domain("main-variable degree is zero"));
    }
    let e = f.param_degree();
    let bound = ((2 * n - 1) * n).max((2 * n - 2) * e);
    let lead = f.coeffs[n].clone();
    sample_and_interpolate(
        bound,
        |t| !lead.eval(t).is_zero(),
        |t| discriminant(&f.at(t)),
        &f.param,
    )
}

/// Resultant of two parametric polynomials in their main variable, at generic degrees.
pub fn resultant_in_param(f: &ParamPoly, g: &ParamPoly) -> Result<IntPoly1> {
    let nf = f.main_degree().ok_or(Error::ZeroPolynomial)?;
    let ng = g.main_degree().ok_or(Error::ZeroPolynomial)?;
    let bound = nf * g.param_degree() + ng * f.param_degree();
    let lf = f.coeffs[nf].clone();
    let lg = g.coeffs[ng].clone();
    sample_and_interpolate(
        bound,
        |t| !lf.eval(t).is_zero() && !lg.eval(t).is_zero(),
        |t| Ok(resultant_formal(&f.at(t), nf, &g.at(t), ng)),
        &f.param,
    )
}
