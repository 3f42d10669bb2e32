//! Arithmetic in `Q[y]/(m)` for a squarefree modulus `m`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::multi::MPoly;
use super::rat::RatPoly1;
use crate::error::{Error, Result};

/// Element of the quotient ring `Q[y]/(m)`. When `m` is reducible the ring is a
/// product of fields and an element stands for one value per root of `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraicElem {
    modulus: Arc<RatPoly1>,
    value: RatPoly1,
}

/// A failed inversion: the modulus splits as `gcd * cofactor`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub gcd: RatPoly1,
    pub cofactor: RatPoly1,
}

impl AlgebraicElem {
    /// Checks that `m` is squarefree and of positive degree; returns it monic.
    pub fn make_modulus(m: &RatPoly1) -> Result<Arc<RatPoly1>> {
        if m.degree().unwrap_or(0) == 0 {
            return Err(Error::domain("modulus must have positive degree"));
        }
        let g = m.gcd(&m.derivative());
        if g.degree() != Some(0) {
            return Err(Error::domain("modulus is not squarefree"));
        }
        Ok(Arc::new(m.monic()))
    }

    pub fn new(modulus: Arc<RatPoly1>, value: &RatPoly1) -> Self {
        let value = value.rem(&modulus);
        AlgebraicElem { modulus, value }
    }

    pub fn from_rational(modulus: Arc<RatPoly1>, c: BigRational) -> Self {
        let var = modulus.var().to_string();
        Self::new(modulus, &RatPoly1::constant(c, &var))
    }

    pub fn from_int(modulus: Arc<RatPoly1>, c: &BigInt) -> Self {
        Self::from_rational(modulus, BigRational::from_integer(c.clone()))
    }

    /// The class of `y` (a root of the modulus).
    pub fn generator(modulus: Arc<RatPoly1>) -> Self {
        let var = modulus.var().to_string();
        Self::new(modulus, &RatPoly1::x(&var))
    }

    pub fn modulus(&self) -> &Arc<RatPoly1> {
        &self.modulus
    }

    pub fn value(&self) -> &RatPoly1 {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// Rational value if the element is constant.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.value.as_constant()
    }

    /// Same residue over a factor of the modulus.
    pub fn reduce_to(&self, factor: &Arc<RatPoly1>) -> Self {
        Self::new(factor.clone(), &self.value)
    }

    fn same(&self, o: &Self) {
        assert!(
            Arc::ptr_eq(&self.modulus, &o.modulus) || self.modulus == o.modulus,
            "moduli differ"
        );
    }

    pub fn add(&self, o: &Self) -> Self {
        self.same(o);
        Self::new(self.modulus.clone(), &(&self.value + &o.value))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.same(o);
        Self::new(self.modulus.clone(), &(&self.value - &o.value))
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.same(o);
        Self::new(self.modulus.clone(), &(&self.value * &o.value))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.modulus.clone(), &-&self.value)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.modulus.clone(), &self.value.scale(c))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::from_rational(self.modulus.clone(), BigRational::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Inverse, or the splitting of the modulus exposed by a zero divisor.
    pub fn try_inv(&self) -> std::result::Result<Self, Split> {
        let (g, s, _) = self.value.ext_gcd(&self.modulus);
        if g.degree() == Some(0) {
            return Ok(Self::new(self.modulus.clone(), &s));
        }
        let g = if g.is_zero() { (*self.modulus).clone() } else { g };
        let cofactor = self.modulus.div_rem(&g).0.monic();
        Err(Split { gcd: g, cofactor })
    }

    pub fn inv(&self) -> Result<Self> {
        self.try_inv().map_err(|_| Error::ZeroDivisor)
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    /// Monic gcd of the modulus with the value: the factor of the modulus on whose
    /// roots this element vanishes.
    pub fn zero_locus(&self) -> RatPoly1 {
        if self.value.is_zero() {
            return (*self.modulus).clone();
        }
        self.modulus.gcd(&self.value)
    }
}

/// Evaluates a bivariate polynomial at `(x, y)` in the quotient ring.
pub fn alg_eval(f: &MPoly, x: &AlgebraicElem, y: &AlgebraicElem) -> AlgebraicElem {
    x.same(y);
    let m = x.modulus.clone();
    let dx = f.degree_in(0).unwrap_or(0) as usize;
    let dy = f.degree_in(1).unwrap_or(0) as usize;
    let mut px = vec![AlgebraicElem::from_rational(m.clone(), BigRational::one())];
    for i in 1..=dx {
        px.push(px[i - 1].mul(x));
    }
    let mut py = vec![AlgebraicElem::from_rational(m.clone(), BigRational::one())];
    for i in 1..=dy {
        py.push(py[i - 1].mul(y));
    }
    let mut acc = AlgebraicElem::from_rational(m, BigRational::zero());
    for (e, c) in f.terms() {
        let t = px[e[0] as usize]
            .mul(&py[e[1] as usize])
            .scale(&BigRational::from_integer(c.clone()));
        acc = acc.add(&t);
    }
    acc
}

impl fmt::Display for AlgebraicElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] mod ({})", self.value, self.modulus)
    }
}
