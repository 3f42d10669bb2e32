//! The surface `K_h` and curve `P_h` obtained from a general instance by the change of
//! variables `X_3 = a x_3 + b x_4`, `h = a x_3 - b x_4`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::energy::GeneralInstance;
use crate::error::{Error, Result};
use crate::polyarith::{IntPoly1, MPoly};

use super::reduce;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveSurface {
    pub inst: GeneralInstance,
    pub h: BigInt,
    /// `(2ab)^(d-1)`.
    pub scale: BigInt,
    /// `H_h(z) = (2ab)^(d-1) h g((z+h)/2a, (z-h)/2b)`, an integer polynomial of degree `d-1`.
    pub shifted_g: IntPoly1,
    /// `K_h(x, y, z, w)`, homogeneous of degree `d`.
    pub k_h: MPoly,
    /// `P_h(x, y, w) = (H_h(x) - H_h(y)) / (x - y)` homogenized to degree `d-2`.
    pub p_h: MPoly,
}

fn binomial_power(shift: &BigInt, e: u32) -> IntPoly1 {
    IntPoly1::new(vec![shift.clone(), BigInt::one()], "z").pow(e)
}

/// `(2ab)^(d-1) h g((z+h)/2a, (z-h)/2b)` with every term cleared exactly.
fn shifted_cofactor(inst: &GeneralInstance, h: &BigInt) -> IntPoly1 {
    let d = inst.degree();
    let two = BigInt::from(2);
    let mut out = IntPoly1::zero("z");
    for (e, c) in inst.g.terms() {
        let (i, j) = (e[0], e[1]);
        let m = num_traits::pow(two.clone(), (d - 1 - i - j) as usize)
            * num_traits::pow(inst.a.clone(), (d - 1 - i) as usize)
            * num_traits::pow(inst.b.clone(), (d - 1 - j) as usize)
            * h
            * c;
        let t = &binomial_power(h, i) * &binomial_power(&-h, j);
        out = &out + &t.scale(&m);
    }
    out
}

/// `H_h(z)` with `h` kept symbolic, in the variables `z, h`.
pub fn shifted_cofactor_family(inst: &GeneralInstance) -> MPoly {
    let d = inst.degree();
    let vars = ["z", "h"];
    let z_plus_h = MPoly::from_i64(&vars, &[(&[1, 0], 1), (&[0, 1], 1)]);
    let z_minus_h = MPoly::from_i64(&vars, &[(&[1, 0], 1), (&[0, 1], -1)]);
    let h = MPoly::from_i64(&vars, &[(&[0, 1], 1)]);
    let mut out = MPoly::zero(&vars);
    for (e, c) in inst.g.terms() {
        let (i, j) = (e[0], e[1]);
        let m = num_traits::pow(BigInt::from(2), (d - 1 - i - j) as usize)
            * num_traits::pow(inst.a.clone(), (d - 1 - i) as usize)
            * num_traits::pow(inst.b.clone(), (d - 1 - j) as usize)
            * c;
        let t = &(&z_plus_h.pow(i) * &z_minus_h.pow(j)) * &h;
        out = &out + &t.scale(&m);
    }
    out
}

/// `(F(x) - F(y)) / (x - y)` in variables `x, y`.
fn divided_difference(f: &IntPoly1) -> MPoly {
    let vars = ["x", "y"];
    let mut out = MPoly::zero(&vars);
    for (n, c) in f.coeffs().iter().enumerate().skip(1) {
        for i in 0..n {
            out.add_term(vec![i as u32, (n - 1 - i) as u32], c.clone());
        }
    }
    out
}

/// Builds `K_h` and `P_h` for `h != 0`.
pub fn build_sieve_surface(inst: &GeneralInstance, h: &BigInt) -> Result<SieveSurface> {
    if h.is_zero() {
        return Err(Error::domain("h must be nonzero"));
    }
    let d = inst.degree();
    let scale = num_traits::pow(BigInt::from(2) * &inst.a * &inst.b, (d - 1) as usize);
    let hh = shifted_cofactor(inst, h);

    let vars4 = ["x", "y", "z"];
    let f3 = MPoly::from_terms(
        &vars4,
        inst.f.terms().iter().map(|(e, c)| (vec![e[0], e[1], 0], c * &scale)),
    );
    let h3 = MPoly::from_uni(&hh, 2, &vars4);
    let kc = f3.constant_like(&scale * &inst.k);
    let affine = &(&f3 - &h3) - &kc;
    let k_h = affine.homogenize("w", d);

    let pd = divided_difference(&hh);
    let x_minus_y = MPoly::from_i64(&["x", "y"], &[(&[1, 0], 1), (&[0, 1], -1)]);
    let lhs = &pd * &x_minus_y;
    let rhs = &MPoly::from_uni(&hh, 0, &["x", "y"]) - &MPoly::from_uni(&hh, 1, &["x", "y"]);
    if lhs != rhs {
        return Err(Error::invariant("divided difference of H_h is not exact"));
    }
    let p_h = pd.homogenize("w", d - 2);
    Ok(SieveSurface {
        inst: inst.clone(),
        h: h.clone(),
        scale,
        shifted_g: hh,
        k_h,
        p_h,
    })
}

impl SieveSurface {
    pub fn degree(&self) -> u32 {
        self.inst.degree()
    }

    /// `g_{d-1}(b, a)`.
    pub fn top_cofactor_at_ba(&self) -> BigInt {
        let top = self.inst.g.homogeneous_part(self.degree() - 1);
        top.eval(&[self.inst.b.clone(), self.inst.a.clone()])
    }

    /// `F(z; X1, X2) = K_h(X1, X2, z, 1)`.
    pub fn detection_poly(&self, x1: &BigInt, x2: &BigInt) -> IntPoly1 {
        self.k_h
            .slice(2, &[x1.clone(), x2.clone(), BigInt::zero(), BigInt::one()])
    }

    /// `v_p(x, y)` for all residues, indexed `x * p + y`: the number of `z` with
    /// `H_h(z) = (2ab)^(d-1) (f(x, y) - k)` mod `p`. A detection polynomial vanishing
    /// identically mod `p` counts every residue.
    pub fn v_table(&self, p: u64) -> Vec<u32> {
        let mut hist = vec![0u32; p as usize];
        let hz = self.shifted_g.reduce_mod(p);
        for z in 0..p {
            let v = hz
                .iter()
                .rev()
                .fold(0u64, |acc, &c| ((acc as u128 * z as u128 + c as u128) % p as u128) as u64);
            hist[v as usize] += 1;
        }
        let target = super::ReducedPoly::new(
            &(&self.inst.f - &self.inst.f.constant_like(self.inst.k.clone())).scale(&self.scale),
            p,
        );
        let mut out = vec![0u32; (p * p) as usize];
        for x in 0..p {
            for y in 0..p {
                out[(x * p + y) as usize] = hist[target.eval(&[x, y]) as usize];
            }
        }
        out
    }

    /// Residue of `(2ab)^(d-1) (f - k)` at every point mod `m`, indexed `x * m + y`.
    pub fn congruence_mask(&self, m: u64) -> Vec<bool> {
        let t = super::ReducedPoly::new(
            &(&self.inst.f - &self.inst.f.constant_like(self.inst.k.clone())).scale(&self.scale),
            m,
        );
        let mut out = vec![false; (m * m) as usize];
        for x in 0..m {
            for y in 0..m {
                out[(x * m + y) as usize] = t.eval(&[x, y]) == 0;
            }
        }
        out
    }

    /// `h mod m`.
    pub fn h_mod(&self, m: u64) -> u64 {
        reduce(&self.h, m)
    }
}
