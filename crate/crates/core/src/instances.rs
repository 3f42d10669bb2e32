//! Shipped instances used by tests, the acceptance suite and the CLI.

use num_bigint::BigInt;

use crate::energy::GeneralInstance;
use crate::polyarith::{parse_poly, IntPoly1};

fn p(text: &str) -> IntPoly1 {
    crate::polyarith::parse_uni(text, "x").expect("shipped polynomial parses")
}

/// `p(x) = x^4`: `f = x^4 - y^4`, `g = x^3 + x^2 y + x y^2 + y^3`, `a = b = 1`.
pub fn quartic_difference(k: i64) -> GeneralInstance {
    GeneralInstance::from_energy(&p("x^4"), BigInt::from(k), 1).expect("valid instance")
}

/// `p(x) = x^3 + x`, a cubic difference instance.
pub fn cubic_difference(k: i64) -> GeneralInstance {
    GeneralInstance::from_energy(&p("x^3 + x"), BigInt::from(k), 1).expect("valid instance")
}

/// `p(x) = x^5 + x`, a quintic difference instance.
pub fn quintic_difference(k: i64) -> GeneralInstance {
    GeneralInstance::from_energy(&p("x^5 + x"), BigInt::from(k), 1).expect("valid instance")
}

/// `x1^4 - x2^4 = (x3 - x4)(x3^3 - x4^3 - 3 x4^2 - 3 x4) + k`.
pub fn shifted_cofactor(k: i64) -> GeneralInstance {
    let vars = ["x", "y"];
    let f = parse_poly("x^4 - y^4", &vars).unwrap();
    let g = parse_poly("x^3 - y^3 - 3*y^2 - 3*y", &vars).unwrap();
    GeneralInstance::new(f, g, 1.into(), 1.into(), BigInt::from(k), 1).expect("valid instance")
}

/// Same data with a different box size.
pub fn with_bound(inst: &GeneralInstance, bound: u64) -> GeneralInstance {
    GeneralInstance {
        bound,
        ..inst.clone()
    }
}
