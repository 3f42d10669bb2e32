//! Lines in the level sets of `f` and on the surfaces `Γ_n`, the rational-line check for
//! difference polynomials, and censuses of the parameters at which `Γ_n`, `K_h` or `P_h`
//! may be singular.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::energy::GeneralInstance;
use crate::error::{Error, Result};
use crate::ffield::shifted_cofactor_family;
use crate::polyarith::{
    binary_form_discriminant, difference_poly, disc_in_param, discriminant, integer_roots,
    integer_roots_in, interpolate, resultant_formal, resultant_in_param, sample_and_interpolate, AlgebraicElem,
    IntPoly1, MPoly, ParamPoly, RatPoly1,
};
use crate::ser::{ser_bigint, ser_bigints, ser_display, ser_opt_bigint};

fn rat(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

/// Every rational root of a nonzero polynomial, ascending.
pub fn rational_roots(p: &RatPoly1) -> Vec<BigRational> {
    let q = p.to_primitive_int();
    let n = match q.degree() {
        Some(n) if n > 0 => n,
        _ => return Vec::new(),
    };
    // a^(n-1) q(y/a) is monic with integer coefficients
    let a = q.lc();
    let mut m = Vec::with_capacity(n + 1);
    for (i, c) in q.coeffs().iter().enumerate().take(n) {
        m.push(c * num_traits::pow(a.clone(), n - 1 - i));
    }
    m.push(BigInt::one());
    let monic = IntPoly1::new(m, q.var());
    let mut out: Vec<BigRational> = integer_roots(&monic)
        .unwrap_or_default()
        .into_iter()
        .map(|y| BigRational::new(y, a.clone()))
        .collect();
    out.sort();
    out
}

/// Splits a squarefree modulus into its linear factors over `Q` and the remaining
/// factor (which may be constant).
fn split_rational(m: &RatPoly1) -> (Vec<BigRational>, RatPoly1) {
    let roots = rational_roots(m);
    let mut rest = m.clone();
    for r in &roots {
        let lin = RatPoly1::new(vec![-r.clone(), BigRational::one()], m.var());
        rest = rest.div_rem(&lin).0;
    }
    (roots, rest.monic())
}

fn eval_at(p: &IntPoly1, x: &AlgebraicElem) -> AlgebraicElem {
    let mut acc = AlgebraicElem::from_int(x.modulus().clone(), &BigInt::zero());
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(x).add(&AlgebraicElem::from_int(x.modulus().clone(), c));
    }
    acc
}

/// Coefficients of `f(t, αt + β)` in `t`, lowest first.
fn line_restriction(f: &MPoly, alpha: &AlgebraicElem, beta: &AlgebraicElem) -> Vec<AlgebraicElem> {
    let m = alpha.modulus().clone();
    let zero = AlgebraicElem::from_int(m.clone(), &BigInt::zero());
    let one = AlgebraicElem::from_int(m.clone(), &BigInt::one());
    let d = f.total_degree().unwrap_or(0) as usize;
    let dy = f.degree_in(1).unwrap_or(0) as usize;
    let mut powers = vec![vec![one]];
    for j in 1..=dy {
        let prev = &powers[j - 1];
        let mut next = vec![zero.clone(); j + 1];
        for (i, c) in prev.iter().enumerate() {
            next[i] = next[i].add(&c.mul(beta));
            next[i + 1] = next[i + 1].add(&c.mul(alpha));
        }
        powers.push(next);
    }
    let mut out = vec![zero; d + 1];
    for (e, c) in f.terms() {
        let (i, j) = (e[0] as usize, e[1] as usize);
        for (s, coef) in powers[j].iter().enumerate() {
            out[i + s] = out[i + s].add(&coef.scale(&rat(c)));
        }
    }
    out
}

/// Factor of the modulus on whose roots every element vanishes.
fn common_zero_locus(elems: &[AlgebraicElem], m: &RatPoly1) -> RatPoly1 {
    let mut z = m.clone();
    for e in elems {
        if z.degree() == Some(0) {
            break;
        }
        z = z.gcd(&e.zero_locus()).monic();
    }
    z
}

/// A line that may lie in a level set `f = l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LineCandidate {
    /// `y = αx + β`, one line per root `α` of the modulus.
    Slope {
        alpha: AlgebraicElem,
        beta: AlgebraicElem,
        level: AlgebraicElem,
        genuine: bool,
    },
    /// `x = γ`.
    Vertical {
        gamma: BigRational,
        level: BigRational,
        genuine: bool,
    },
}

impl LineCandidate {
    /// The identity `f(t, αt + β) = l` (or `f(γ, t) = l`) holds.
    pub fn is_genuine(&self) -> bool {
        match self {
            LineCandidate::Slope { genuine, .. } | LineCandidate::Vertical { genuine, .. } => *genuine,
        }
    }

    /// Slope candidates with a linear modulus: `(α, β, l)` in `Q`.
    pub fn rational_slope(&self) -> Option<(BigRational, BigRational, BigRational)> {
        match self {
            LineCandidate::Slope { alpha, beta, level, .. } if alpha.modulus().degree() == Some(1) => {
                let m = alpha.modulus();
                Some((-m.coeff(0), beta.as_rational()?, level.as_rational()?))
            }
            _ => None,
        }
    }

    /// The level as a rational number when it is the same on every root.
    pub fn rational_level(&self) -> Option<BigRational> {
        match self {
            LineCandidate::Slope { level, .. } => level.as_rational(),
            LineCandidate::Vertical { level, .. } => Some(level.clone()),
        }
    }

    /// Whether the whole line is defined over `Q`.
    pub fn is_rational(&self) -> bool {
        match self {
            LineCandidate::Slope { .. } => self.rational_slope().is_some(),
            LineCandidate::Vertical { .. } => true,
        }
    }
}

impl fmt::Display for LineCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.is_genuine() { "line" } else { "refuted" };
        if let Some((a, b, l)) = self.rational_slope() {
            return write!(f, "{tag}: y = ({a})*x + ({b}), level {l}");
        }
        match self {
            LineCandidate::Slope { alpha, beta, level, .. } => write!(
                f,
                "{tag}: y = a*x + ({}) with {} = 0, level {}",
                beta.value(),
                alpha.modulus(),
                level.value()
            ),
            LineCandidate::Vertical { gamma, level, .. } => write!(f, "{tag}: x = {gamma}, level {level}"),
        }
    }
}

fn top_forms(f: &MPoly) -> Result<(u32, MPoly, MPoly)> {
    if f.nvars() != 2 {
        return Err(Error::domain("f must be bivariate"));
    }
    let d = f.total_degree().ok_or(Error::ZeroPolynomial)?;
    if d < 2 {
        return Err(Error::domain("line classification needs deg f >= 2"));
    }
    let top = f.homogeneous_part(d);
    if binary_form_discriminant(&top)?.is_zero() {
        return Err(Error::domain("leading form f_d is not squarefree"));
    }
    Ok((d, top, f.homogeneous_part(d - 1)))
}

/// Every line that can lie in a level set of `f`, each checked against the full identity.
/// Slope candidates are grouped by factors of `f_d(1, y)`; rational slopes get their own
/// linear factor.
pub fn classify_level_lines(f: &MPoly) -> Result<Vec<LineCandidate>> {
    let (d, top, next) = top_forms(f)?;
    let one = BigInt::one();
    let zero = BigInt::zero();
    let mut out = Vec::new();

    let fd1 = top.slice(1, &[one.clone(), zero.clone()]);
    if fd1.degree().unwrap_or(0) > 0 {
        let var = fd1.var().to_string();
        let m = AlgebraicElem::make_modulus(&fd1.to_rat())?;
        let alpha = AlgebraicElem::generator(m.clone());
        let num = eval_at(&next.slice(1, &[one.clone(), zero.clone()]).with_var(&var), &alpha);
        let den = eval_at(&fd1.derivative(), &alpha);
        let beta = num.neg().div(&den)?;
        let coeffs = line_restriction(f, &alpha, &beta);
        let level = coeffs[0].clone();
        let locus = common_zero_locus(&coeffs[1..], &m);
        let rest = m.div_rem(&locus).0.monic();
        for (part, genuine) in [(locus, true), (rest, false)] {
            if part.degree().unwrap_or(0) == 0 {
                continue;
            }
            let (roots, irr) = split_rational(&part);
            let mut pieces: Vec<RatPoly1> = roots
                .iter()
                .map(|r| RatPoly1::new(vec![-r.clone(), BigRational::one()], &var))
                .collect();
            if irr.degree().unwrap_or(0) > 0 {
                pieces.push(irr);
            }
            for piece in pieces {
                let pm = Arc::new(piece);
                out.push(LineCandidate::Slope {
                    alpha: alpha.reduce_to(&pm),
                    beta: beta.reduce_to(&pm),
                    level: level.reduce_to(&pm),
                    genuine,
                });
            }
        }
    }

    if top.coeff(&[0, d]).is_zero() {
        let dx = top.coeff(&[1, d - 1]);
        let gamma = BigRational::new(-next.coeff(&[0, d - 1]), dx);
        let mut row = vec![BigRational::zero(); f.degree_in(1).unwrap_or(0) as usize + 1];
        for (e, c) in f.terms() {
            row[e[1] as usize] += rat(c) * num_traits::pow(gamma.clone(), e[0] as usize);
        }
        let genuine = row[1..].iter().all(|c| c.is_zero());
        out.push(LineCandidate::Vertical {
            gamma,
            level: row[0].clone(),
            genuine,
        });
    }
    Ok(out)
}

/// Rational lines contained in `f = k`, as displayed candidates.
pub fn rational_lines_in_level(f: &MPoly, k: &BigInt) -> Result<Vec<LineCandidate>> {
    let k = rat(k);
    Ok(classify_level_lines(f)?
        .into_iter()
        .filter(|c| c.is_genuine() && c.is_rational() && c.rational_level().as_ref() == Some(&k))
        .collect())
}

/// The computation behind the absence of lines on `p(x) - p(y) = k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoLinesReport {
    pub degree: u32,
    pub k: BigInt,
    /// Factor of `α^d - 1` on whose roots `(t, αt + β)` lies on the curve.
    pub genuine_locus: RatPoly1,
    /// `p(t) - p(αt + β) - k` at `α = 1`, `β = 0`, `t = 0`.
    pub at_identity: BigInt,
    /// The same expression at `t = -β/(α - 1)` over the roots `α != 1`; absent for `d = 1`.
    pub off_identity: Option<AlgebraicElem>,
    /// Lines defined over `Q`, as `(α, β)`.
    pub rational_lines: Vec<(BigRational, BigRational)>,
}

impl NoLinesReport {
    pub fn has_line(&self) -> bool {
        self.genuine_locus.degree().unwrap_or(0) > 0
    }
}

/// Looks for lines `y = αx + β` on `p(x) - p(y) = k`. The leading coefficients force
/// `α^d = 1` and `β = a_{d-1}(α - 1)/(d a_d)`; the full identity is then tested on every
/// root at once.
pub fn rational_line_check(p: &IntPoly1, k: &BigInt) -> Result<NoLinesReport> {
    let d = p.degree().filter(|&d| d >= 1).ok_or_else(|| Error::domain("deg p must be at least 1"))?;
    let ad = p.coeff(d);
    let ad1 = p.coeff(d - 1);
    let var = "a";
    let mut mc = vec![BigRational::zero(); d + 1];
    mc[0] = -BigRational::one();
    mc[d] = BigRational::one();
    let m = AlgebraicElem::make_modulus(&RatPoly1::new(mc, var))?;
    let alpha = AlgebraicElem::generator(m.clone());
    let one = AlgebraicElem::from_int(m.clone(), &BigInt::one());
    let shift = BigRational::new(ad1.clone(), BigInt::from(d) * &ad);
    let beta = alpha.sub(&one).scale(&shift);

    let f = difference_poly(p);
    let mut coeffs = line_restriction(&f, &alpha, &beta);
    coeffs[0] = coeffs[0].sub(&AlgebraicElem::from_int(m.clone(), k));
    let locus = common_zero_locus(&coeffs, &m);

    let mut rational_lines = Vec::new();
    for r in rational_roots(&locus) {
        let b = (&r - BigRational::one()) * &shift;
        rational_lines.push((r, b));
    }

    let at_identity = -k;
    let off_identity = if d >= 2 {
        let c = vec![BigRational::one(); d];
        let m2 = AlgebraicElem::make_modulus(&RatPoly1::new(c, var))?;
        let a2 = AlgebraicElem::generator(m2.clone());
        let b2 = beta.reduce_to(&m2);
        let one2 = AlgebraicElem::from_int(m2.clone(), &BigInt::one());
        let t = b2.neg().div(&a2.sub(&one2))?;
        let kk = AlgebraicElem::from_int(m2.clone(), k);
        Some(eval_at(p, &t).sub(&eval_at(p, &a2.mul(&t).add(&b2))).sub(&kk))
    } else {
        None
    };
    Ok(NoLinesReport {
        degree: d as u32,
        k: k.clone(),
        genuine_locus: locus,
        at_identity,
        off_identity,
        rational_lines,
    })
}

/// A case-(1) or case-(2) line on `Γ_n` through integer points of the box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GammaLine {
    /// `slope` (`x2 = α x1 + β`) or `vertical` (`x1 = γ`).
    pub kind: &'static str,
    pub line: String,
    pub level: String,
    /// Integer `x3` in `[1, B]` solving `(a x3 - b n) g(x3, n) + k = level`.
    #[serde(serialize_with = "ser_bigints")]
    pub x3: Vec<BigInt>,
    /// Integer points `(x1, x2, x3)` of the box on the line. Exact for lines over `Q`;
    /// for irrational slopes an upper bound of one point per `x3`.
    pub points: u64,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GammaLineReport {
    #[serde(serialize_with = "ser_bigint")]
    pub n: BigInt,
    pub bound: u64,
    pub lines: Vec<GammaLine>,
    /// Genuine candidates at level `k`; each such line holds at most one integer point.
    pub single_point_lines: usize,
    pub total_points: u64,
}

/// Integers `x3` in `[1, B]` with `G_n(x3) + k = c`; `None` when every `x3` works.
fn x3_solutions(gn: &IntPoly1, k: &BigInt, c: &BigRational, b: u64) -> Vec<BigInt> {
    let den = c.denom().clone();
    let shifted = &gn.scale(&den) + &IntPoly1::constant(k * &den - c.numer(), gn.var());
    let (lo, hi) = (BigInt::one(), BigInt::from(b));
    match integer_roots_in(&shifted, &lo, &hi) {
        Some(r) => r,
        None => (1..=b).map(BigInt::from).collect(),
    }
}

/// Rational values taken by an element on the roots of its modulus.
fn rational_values(e: &AlgebraicElem) -> Vec<BigRational> {
    if let Some(c) = e.as_rational() {
        return vec![c];
    }
    // characteristic polynomial Res_y(m(y), den z - num(y)) has the values as roots
    let m = e.modulus().to_primitive_int();
    let v = e.value();
    let den = v.coeffs().iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let num: Vec<BigInt> = v
        .coeffs()
        .iter()
        .map(|c| (c * rat(&den)).to_integer())
        .collect();
    let mut rows: Vec<IntPoly1> = num.iter().map(|c| IntPoly1::constant(-c, "z")).collect();
    rows[0] = &rows[0] + &IntPoly1::monomial(den, 1, "z");
    let mrows: Vec<IntPoly1> = m.coeffs().iter().map(|c| IntPoly1::constant(c.clone(), "z")).collect();
    let f = ParamPoly::new(mrows, "z", "y");
    let g = ParamPoly::new(rows, "z", "y");
    match resultant_in_param(&f, &g) {
        Ok(cp) if !cp.is_zero() => rational_roots(&cp.to_rat())
            .into_iter()
            .filter(|c| {
                let diff = e.sub(&AlgebraicElem::from_rational(e.modulus().clone(), c.clone()));
                diff.zero_locus().degree().unwrap_or(0) > 0
            })
            .collect(),
        _ => Vec::new(),
    }
}

/// The points of `{1..B}` lying on `x2 = α x1 + β` with `x2` also in `{1..B}`.
fn slope_points(alpha: &BigRational, beta: &BigRational, b: u64) -> u64 {
    let top = rat(&BigInt::from(b));
    (1..=b)
        .filter(|&x| {
            let y = alpha * rat(&BigInt::from(x)) + beta;
            y.is_integer() && y >= BigRational::one() && y <= top
        })
        .count() as u64
}

/// Lines on `Γ_n` given the level-set candidates of `f`.
pub fn gamma_n_line_report_with(
    inst: &GeneralInstance,
    candidates: &[LineCandidate],
    n: &BigInt,
) -> Result<GammaLineReport> {
    let gslice = inst.g.slice(0, &[BigInt::zero(), n.clone()]);
    if gslice.is_zero() {
        return Err(Error::domain(format!("g(x, {n}) vanishes identically")));
    }
    let gn = inst.right_side().slice(0, &[BigInt::zero(), n.clone()]);
    let b = inst.bound;
    let k = rat(&inst.k);
    let mut lines = Vec::new();
    let mut single = 0usize;
    for c in candidates.iter().filter(|c| c.is_genuine()) {
        match c {
            LineCandidate::Vertical { gamma, level, .. } => {
                if *level == k {
                    single += 1;
                    continue;
                }
                let x3 = x3_solutions(&gn, &inst.k, level, b);
                let inside = gamma.is_integer() && gamma.to_integer() >= BigInt::one() && gamma.to_integer() <= BigInt::from(b);
                let per = if inside { b } else { 0 };
                lines.push(GammaLine {
                    kind: "vertical",
                    line: format!("x1 = {gamma}"),
                    level: level.to_string(),
                    points: per * x3.len() as u64,
                    x3,
                    exact: true,
                });
            }
            LineCandidate::Slope { level, beta, .. } => {
                if let Some((a, bt, l)) = c.rational_slope() {
                    if l == k {
                        single += 1;
                        continue;
                    }
                    let x3 = x3_solutions(&gn, &inst.k, &l, b);
                    let per = slope_points(&a, &bt, b);
                    lines.push(GammaLine {
                        kind: "slope",
                        line: format!("x2 = ({a})*x1 + ({bt})"),
                        level: l.to_string(),
                        points: per * x3.len() as u64,
                        x3,
                        exact: true,
                    });
                    continue;
                }
                let kk = AlgebraicElem::from_rational(level.modulus().clone(), k.clone());
                if level.sub(&kk).zero_locus().degree().unwrap_or(0) > 0 {
                    single += 1;
                }
                for l in rational_values(level).into_iter().filter(|l| *l != k) {
                    let x3 = x3_solutions(&gn, &inst.k, &l, b);
                    if x3.is_empty() {
                        continue;
                    }
                    lines.push(GammaLine {
                        kind: "slope",
                        line: format!("x2 = a*x1 + ({}) with {} = 0", beta.value(), level.modulus()),
                        level: l.to_string(),
                        points: x3.len() as u64,
                        x3,
                        exact: false,
                    });
                }
            }
        }
    }
    let total_points = lines.iter().map(|l| l.points).sum();
    Ok(GammaLineReport {
        n: n.clone(),
        bound: b,
        lines,
        single_point_lines: single,
        total_points,
    })
}

pub fn gamma_n_line_report(inst: &GeneralInstance, n: &BigInt) -> Result<GammaLineReport> {
    let cands = classify_level_lines(&inst.f)?;
    gamma_n_line_report_with(inst, &cands, n)
}

/// Integer points on case-(1)/(2) lines of `Γ_n`, summed over `1 <= n <= B`.
pub fn gamma_line_points_total(inst: &GeneralInstance) -> Result<u64> {
    let cands = classify_level_lines(&inst.f)?;
    let mut total = 0;
    for n in 1..=inst.bound {
        let n = BigInt::from(n);
        if inst.g.slice(0, &[BigInt::zero(), n.clone()]).is_zero() {
            continue;
        }
        total += gamma_n_line_report_with(inst, &cands, &n)?.total_points;
    }
    Ok(total)
}

/// A polynomial whose roots include every critical value `f(r, s)`, `∇f(r, s) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalValues {
    /// Squarefree, primitive.
    pub poly: IntPoly1,
    /// Product of the contents of both resultants. Primes dividing it lose the mod `p`
    /// guarantee.
    pub content: BigInt,
}

/// `Res_x(R(x), Res_y(f - v, f_y))` in `v` with `R` the squarefree part of
/// `Res_y(f_x, f_y)`, reduced to its squarefree part.
pub fn critical_value_poly(f: &MPoly) -> Result<CriticalValues> {
    f.total_degree().ok_or(Error::ZeroPolynomial)?;
    let f = f.rename(&["x", "y"]);
    let fx = f.partial(0);
    let fy = f.partial(1);
    let py = ParamPoly::from_mpoly(&fy, 1, 0);
    let r1 = resultant_in_param(&ParamPoly::from_mpoly(&fx, 1, 0), &py)?;
    if r1.is_zero() {
        return Err(Error::domain("f_x and f_y share a factor"));
    }
    let r1_content = r1.content();
    let r1 = r1.to_rat().squarefree_part().to_primitive_int();
    let e1 = r1.degree().unwrap_or(0);
    if e1 == 0 {
        return Ok(CriticalValues {
            poly: IntPoly1::constant(BigInt::one(), "v"),
            content: r1_content,
        });
    }
    let dy = f.degree_in(1).unwrap_or(0) as usize;
    let bound = e1 * dy.saturating_sub(1);
    let mut samples = Vec::with_capacity(bound + 1);
    let mut v = BigInt::zero();
    for _ in 0..=bound {
        let fv = &f - &f.constant_like(v.clone());
        samples.push((v.clone(), resultant_in_param(&ParamPoly::from_mpoly(&fv, 1, 0), &py)?));
        v = if v.is_positive() { -v } else { -v + 1 };
    }
    // the x-degree of Res_y(f - v, f_y) is attained at one of any dy sample values
    let xdeg = samples.iter().filter_map(|(_, r)| r.degree()).max().unwrap_or(0);
    let xs: Vec<BigInt> = samples.iter().map(|(v, _)| v.clone()).collect();
    let ys: Vec<BigRational> = samples
        .iter()
        .map(|(_, r2)| rat(&resultant_formal(&r1, e1, r2, xdeg)))
        .collect();
    let full = interpolate(&xs, &ys, "v").to_int()?;
    if full.is_zero() {
        return Err(Error::domain("critical values are not isolated"));
    }
    Ok(CriticalValues {
        poly: full.to_rat().squarefree_part().to_primitive_int().with_var("v"),
        content: r1_content * full.content(),
    })
}

/// The three parametrised families whose singular members are counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    /// `Γ_n`, parameter `n`.
    #[serde(rename = "gamma")]
    Gamma,
    /// `K_h`, parameter `h`.
    #[serde(rename = "K")]
    K,
    /// `P_h`, parameter `h`.
    #[serde(rename = "P")]
    P,
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gamma" | "Gamma" | "G" => Ok(Family::Gamma),
            "K" | "k" => Ok(Family::K),
            "P" | "p" => Ok(Family::P),
            _ => Err(Error::domain(format!("unknown family `{s}` (gamma, K or P)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularCensus {
    pub family: Family,
    pub parameter: &'static str,
    /// Vanishes at every parameter value with a singular member (points with `w = 1`).
    #[serde(serialize_with = "ser_display")]
    pub disc_polynomial: IntPoly1,
    /// Discriminant of the defining one-variable polynomial, as a polynomial in the parameter.
    #[serde(serialize_with = "ser_display")]
    pub core_discriminant: IntPoly1,
    #[serde(serialize_with = "ser_bigint")]
    pub leading_coefficient: BigInt,
    #[serde(serialize_with = "ser_bigint")]
    pub predicted_leading_coefficient: BigInt,
    pub core_degree: usize,
    pub predicted_degree: usize,
    /// The one parameter value that may carry a singular point with `w = 0` (`Γ_n` only).
    #[serde(serialize_with = "ser_opt_bigint")]
    pub top_singular: Option<BigInt>,
    /// Parameter values in range where a singular member is possible.
    #[serde(serialize_with = "ser_bigints")]
    pub roots: Vec<BigInt>,
    /// Primes dividing this number are outside the mod `p` guarantee.
    #[serde(serialize_with = "ser_bigint")]
    pub bad_divisor: BigInt,
    pub bound: u64,
}

impl SingularCensus {
    /// Whether the census allows a singular member at `t`.
    pub fn may_be_singular(&self, t: &BigInt) -> bool {
        self.disc_polynomial.eval(t).is_zero() || self.top_singular.as_ref() == Some(t)
    }

    /// Whether a singular member mod `p` is allowed at `t`.
    pub fn may_be_singular_mod(&self, t: &BigInt, p: u64) -> bool {
        let p = BigInt::from(p);
        (self.disc_polynomial.eval(t) % &p).is_zero()
            || self.top_singular.as_ref().is_some_and(|s| ((s - t) % &p).is_zero())
    }
}

/// `Res_v(CV(v), Res_t(F(t) + c - s v, F'(t)))` at formal degrees, where `F` is the family
/// polynomial at one parameter value.
fn census_value(cv: &IntPoly1, fam: &ParamPoly, t: &BigInt, c: &BigInt, s: &BigInt) -> Result<BigInt> {
    let deg = fam.main_degree().unwrap_or(0);
    let ft = fam.at(t);
    let dft = ft.derivative();
    let q = sample_and_interpolate(
        deg.saturating_sub(1),
        |_| true,
        |v| {
            let g = &ft + &IntPoly1::constant(c - s * v, ft.var());
            Ok(resultant_formal(&g, deg, &dft, deg - 1))
        },
        "v",
    )?;
    Ok(resultant_formal(cv, cv.degree().unwrap_or(0), &q, deg - 1))
}

/// Parameter degree bound for `Res(F, F')` in the main variable. The coefficient of
/// `t^j` has parameter degree at most `(D - j) + s`, and the resultant is isobaric.
fn self_resultant_degree(fam: &ParamPoly) -> usize {
    let deg = fam.main_degree().unwrap_or(0);
    let shift = fam
        .coeffs
        .iter()
        .enumerate()
        .filter_map(|(j, c)| c.degree().map(|e| e.saturating_sub(deg - j)))
        .max()
        .unwrap_or(0);
    deg * deg.saturating_sub(1) + shift * (2 * deg).saturating_sub(1)
}

fn census_poly(cv: &IntPoly1, fam: &ParamPoly, c: &BigInt, s: &BigInt) -> Result<IntPoly1> {
    let deg = fam.main_degree().ok_or(Error::ZeroPolynomial)?;
    if deg == 0 {
        return Err(Error::domain("family polynomial is constant"));
    }
    let bound = cv.degree().unwrap_or(0) * self_resultant_degree(fam);
    sample_and_interpolate(bound, |_| true, |t| census_value(cv, fam, t, c, s), &fam.param)
}

/// `C g_{d-1}((x+1)/2a, (x-1)/2b)` with `C = (2ab)^(d-1)`.
fn limit_form(inst: &GeneralInstance, form: &MPoly) -> Result<IntPoly1> {
    let d = inst.degree();
    let two = BigInt::from(2);
    let sx = RatPoly1::new(
        vec![BigRational::new(BigInt::one(), &two * &inst.a); 2],
        "x",
    );
    let sy = RatPoly1::new(
        vec![
            BigRational::new(-BigInt::one(), &two * &inst.b),
            BigRational::new(BigInt::one(), &two * &inst.b),
        ],
        "x",
    );
    let c = num_traits::pow(&two * &inst.a * &inst.b, (d - 1) as usize);
    form.substitute_rat(&[sx, sy]).scale(&rat(&c)).to_int()
}

/// `(ab)^(d-1) [(1/a) ∂_x g_{d-1} + (1/b) ∂_y g_{d-1}](x/a, y/b)`, cleared of denominators.
pub fn gradient_form(inst: &GeneralInstance) -> MPoly {
    let d = inst.degree();
    let top = inst.g.homogeneous_part(d - 1);
    let mut out = MPoly::zero(&["x", "y"]);
    for (e, c) in top.terms() {
        let (i, j) = (e[0], e[1]);
        let w = c * num_traits::pow(inst.a.clone(), (d - 1 - i) as usize) * num_traits::pow(inst.b.clone(), (d - 1 - j) as usize);
        if i > 0 {
            out.add_term(vec![i - 1, j], &w * BigInt::from(i));
        }
        if j > 0 {
            out.add_term(vec![i, j - 1], &w * BigInt::from(j));
        }
    }
    out
}

fn lead_and_degree(p: &IntPoly1) -> (BigInt, usize) {
    (p.lc(), p.degree().unwrap_or(0))
}

/// Parameter values in range at which a member of the family may be singular.
pub fn singular_census(inst: &GeneralInstance, family: Family, bound: u64) -> Result<SingularCensus> {
    let d = inst.degree();
    if d < 3 {
        return Err(Error::domain("censuses need deg f >= 3"));
    }
    let du = d as usize;
    let top_f = inst.f.homogeneous_part(d);
    let disc_fd = binary_form_discriminant(&top_f)?;
    if disc_fd.is_zero() {
        return Err(Error::domain("leading form f_d is not squarefree"));
    }
    let gtop = inst.g.homogeneous_part(d - 1);
    let big_g = gtop.eval(&[inst.b.clone(), inst.a.clone()]);
    let scale = num_traits::pow(BigInt::from(2) * &inst.a * &inst.b, du - 1);
    let b = BigInt::from(bound);
    let one = BigInt::one();
    let nonzero_range = |p: &IntPoly1| -> Result<Vec<BigInt>> {
        let r = integer_roots_in(p, &-b.clone(), &b)
            .ok_or_else(|| Error::domain("census polynomial vanishes identically"))?;
        Ok(r.into_iter().filter(|t| !t.is_zero()).collect())
    };

    match family {
        Family::Gamma => {
            let cv = critical_value_poly(&inst.f)?;
            let rs = inst.right_side().rename(&["t", "n"]);
            let fam = ParamPoly::from_mpoly(&rs, 0, 1);
            let deg = fam.main_degree().unwrap_or(0);
            let census = census_poly(&cv.poly, &fam, &inst.k, &one)?;
            let core = disc_in_param(&fam)?;
            let (lc, cd) = lead_and_degree(&core);
            let lin = IntPoly1::new(vec![-inst.b.clone(), inst.a.clone()], "t");
            let g1 = gtop.slice(0, &[BigInt::zero(), one.clone()]).with_var("t");
            let predicted = discriminant(&(&lin * &g1))?;
            let e = |i: u32, j: u32| inst.g.coeff(&[i, j]);
            let (top_singular, top_factor) = if e(d - 1, 0).is_zero() {
                let (c1, c0) = (e(d - 2, 1), e(d - 2, 0));
                if c1.is_zero() {
                    if c0.is_zero() {
                        return Err(Error::domain("every member is singular at infinity"));
                    }
                    (None, &inst.a * &c0)
                } else if (&c0 % &c1).is_zero() {
                    (Some(-(&c0 / &c1)), &inst.a * &c1)
                } else {
                    (None, &inst.a * &c1)
                }
            } else {
                (None, &inst.a * e(d - 1, 0))
            };
            let mut roots = integer_roots_in(&census, &one, &b)
                .ok_or_else(|| Error::domain("census polynomial vanishes identically"))?;
            if let Some(t) = &top_singular {
                if *t >= one && *t <= b && !roots.contains(t) {
                    roots.push(t.clone());
                    roots.sort();
                }
            }
            Ok(SingularCensus {
                family,
                parameter: "n",
                disc_polynomial: census.with_var("n"),
                core_discriminant: core.with_var("n"),
                leading_coefficient: lc,
                predicted_leading_coefficient: predicted,
                core_degree: cd,
                predicted_degree: (deg - 1) * (2 * du - deg),
                top_singular,
                roots,
                bad_divisor: BigInt::from(d) * &disc_fd * &cv.content * top_factor,
                bound,
            })
        }
        Family::K => {
            if big_g.is_zero() {
                return Err(Error::domain("g_{d-1}(b, a) = 0"));
            }
            let cv = critical_value_poly(&inst.f)?;
            let fam = ParamPoly::from_mpoly(&shifted_cofactor_family(inst), 0, 1);
            let census = census_poly(&cv.poly, &fam, &(&scale * &inst.k), &scale)?;
            let core = disc_in_param(&fam)?;
            let (lc, cd) = lead_and_degree(&core);
            let predicted = discriminant(&limit_form(inst, &gtop)?)?;
            Ok(SingularCensus {
                family,
                parameter: "h",
                roots: nonzero_range(&census)?,
                disc_polynomial: census.with_var("h"),
                core_discriminant: core.with_var("h"),
                leading_coefficient: lc,
                predicted_leading_coefficient: predicted,
                core_degree: cd,
                predicted_degree: (du - 2) * (du + 1),
                top_singular: None,
                bad_divisor: BigInt::from(d * (d - 1)) * &scale * &disc_fd * &cv.content * &big_g,
                bound,
            })
        }
        Family::P => {
            if d > 4 {
                return Err(Error::domain("the P_h census covers d = 3 and d = 4"));
            }
            if big_g.is_zero() {
                return Err(Error::domain("g_{d-1}(b, a) = 0"));
            }
            if d == 4 && binary_form_discriminant(&gradient_form(inst))?.is_zero() {
                return Err(Error::domain("gradient form of g_{d-1} is not squarefree"));
            }
            let fam = ParamPoly::from_mpoly(&shifted_cofactor_family(inst), 0, 1).derivative();
            let deg = fam.main_degree().unwrap_or(0);
            // P_h(x, x, 1) = H_h'(x); singular points need a double root
            let census = sample_and_interpolate(
                self_resultant_degree(&fam),
                |_| true,
                |t| {
                    let p = fam.at(t);
                    Ok(resultant_formal(&p, deg, &p.derivative(), deg - 1))
                },
                "h",
            )?;
            let core = disc_in_param(&fam)?;
            let (lc, cd) = lead_and_degree(&core);
            let grad = limit_form(inst, &gtop)?.derivative();
            let predicted = discriminant(&grad)?;
            Ok(SingularCensus {
                family,
                parameter: "h",
                roots: nonzero_range(&census)?,
                disc_polynomial: census.with_var("h"),
                core_discriminant: core.with_var("h"),
                leading_coefficient: lc,
                predicted_leading_coefficient: predicted,
                core_degree: cd,
                predicted_degree: du * (du - 3),
                top_singular: None,
                bad_divisor: BigInt::from(6) * &scale * &big_g,
                bound,
            })
        }
    }
}

/// Exact tests of the four conditions on `(f, g, a, b)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisReport {
    /// `f = k` contains no line over `Q`; undecided when `f_d` is not squarefree.
    pub no_rational_line: Option<bool>,
    pub top_form_squarefree: bool,
    /// `(ax - by) g_{d-1}(x, y)` is squarefree.
    pub cofactor_form_squarefree: bool,
    /// Only checked for `d = 4`.
    pub gradient_form_squarefree: Option<bool>,
    pub lines: Vec<String>,
}

impl HypothesisReport {
    pub fn passes(&self) -> bool {
        self.no_rational_line == Some(true)
            && self.top_form_squarefree
            && self.cofactor_form_squarefree
            && self.gradient_form_squarefree != Some(false)
    }
}

pub fn check_hypotheses(inst: &GeneralInstance) -> Result<HypothesisReport> {
    let d = inst.degree();
    let top = inst.f.homogeneous_part(d);
    let top_ok = !binary_form_discriminant(&top)?.is_zero();
    let lin = MPoly::from_terms(
        &["x", "y"],
        [(vec![1, 0], inst.a.clone()), (vec![0, 1], -inst.b.clone())],
    );
    let cof = &lin * &inst.g.homogeneous_part(d - 1).rename(&["x", "y"]);
    let cof_ok = !binary_form_discriminant(&cof)?.is_zero();
    let grad_ok = if d == 4 {
        Some(!binary_form_discriminant(&gradient_form(inst))?.is_zero())
    } else {
        None
    };
    let (no_line, lines) = if top_ok && d >= 2 {
        let found = rational_lines_in_level(&inst.f, &inst.k)?;
        (Some(found.is_empty()), found.iter().map(|c| c.to_string()).collect())
    } else {
        (None, Vec::new())
    };
    Ok(HypothesisReport {
        no_rational_line: no_line,
        top_form_squarefree: top_ok,
        cofactor_form_squarefree: cof_ok,
        gradient_form_squarefree: grad_ok,
        lines,
    })
}
