use num_bigint::BigInt;
use num_traits::{One, Signed};

/// Joins already-ordered terms into canonical text: explicit `*` and `^`,
/// unit coefficients dropped, `0` for the empty sum.
pub(crate) fn format_terms(terms: &[(BigInt, Vec<(String, u32)>)]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (idx, (c, vars)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        if idx == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        let mut factors: Vec<String> = Vec::new();
        if vars.is_empty() || !a.is_one() {
            factors.push(a.to_string());
        }
        for (v, e) in vars {
            if *e == 1 {
                factors.push(v.clone());
            } else {
                factors.push(format!("{v}^{e}"));
            }
        }
        out.push_str(&factors.join("*"));
    }
    out
}
