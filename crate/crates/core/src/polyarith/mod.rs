//! Exact polynomial arithmetic: dense univariate polynomials over ℤ and ℚ, sparse
//! multivariate polynomials, the expression parser and canonical printer,
//! resultants and discriminants, and quotient-ring arithmetic for algebraic numbers.

mod algebraic;
mod multi;
mod parse;
mod print;
mod rat;
mod resultant;
mod roots;
mod uni;

pub use algebraic::{alg_eval, AlgebraicElem, Split};
pub use multi::{IntPoly2, MPoly};
pub use parse::{parse_poly, MAX_DEGREE};
pub use rat::RatPoly1;
pub use resultant::{
    bareiss_det, binary_form_discriminant, disc_in_param, discriminant, interpolate, rational_det,
    resultant, resultant_formal, resultant_in_param, sylvester, ParamPoly,
};
pub(crate) use resultant::sample_and_interpolate;
pub use roots::{integer_roots, integer_roots_in, root_bound};
pub use uni::IntPoly1;

use num_bigint::BigInt;

use crate::error::{Error, Result};

/// Terms of total degree exactly `i`.
pub fn homogeneous_part(f: &MPoly, i: u32) -> MPoly {
    f.homogeneous_part(i)
}

/// Positive gcd of the coefficients.
pub fn content(f: &MPoly) -> Result<BigInt> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(f.content())
}

/// Parses a univariate polynomial in `var`.
pub fn parse_uni(text: &str, var: &str) -> Result<IntPoly1> {
    let p = parse_poly(text, &[var])?;
    Ok(p.to_uni(0).expect("single variable"))
}

/// `p(x) - p(y)` as a polynomial in `x, y`.
pub fn difference_poly(p: &IntPoly1) -> MPoly {
    let vars = ["x", "y"];
    &MPoly::from_uni(p, 0, &vars) - &MPoly::from_uni(p, 1, &vars)
}

/// The cofactor `(p(x) - p(y)) / (x - y)`.
pub fn difference_cofactor(p: &IntPoly1) -> MPoly {
    let vars = ["x", "y"];
    let mut g = MPoly::zero(&vars);
    // (x^n - y^n)/(x - y) = sum_{i+j=n-1} x^i y^j
    for (n, c) in p.coeffs().iter().enumerate().skip(1) {
        for i in 0..n {
            g.add_term(vec![i as u32, (n - 1 - i) as u32], c.clone());
        }
    }
    g
}
