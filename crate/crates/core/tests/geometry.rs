use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use polyenergy::energy::{curve_count_in_box, GeneralInstance};
use polyenergy::ffield::{is_prime, ReducedPoly};
use polyenergy::fit::fit_exponent;
use polyenergy::geometry::*;
use polyenergy::instances;
use polyenergy::polyarith::{
    alg_eval, binary_form_discriminant, parse_poly, parse_uni, AlgebraicElem, IntPoly1, MPoly,
    RatPoly1,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(big(n), big(d))
}

fn bivariate(text: &str) -> MPoly {
    parse_poly(text, &["x", "y"]).unwrap()
}

fn elem_const(e: &AlgebraicElem, c: BigRational) -> AlgebraicElem {
    AlgebraicElem::from_rational(e.modulus().clone(), c)
}

#[derive(Clone, Copy, Debug)]
struct C(f64, f64);

impl C {
    fn add(self, o: C) -> C {
        C(self.0 + o.0, self.1 + o.1)
    }
    fn mul(self, o: C) -> C {
        C(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
    }
    fn scale(self, s: f64) -> C {
        C(self.0 * s, self.1 * s)
    }
    fn abs(self) -> f64 {
        self.0.hypot(self.1)
    }
}

fn horner(p: &[f64], x: C) -> C {
    p.iter().rev().fold(C(0.0, 0.0), |acc, &c| acc.mul(x).add(C(c, 0.0)))
}

#[test]
fn no_lines_on_the_cube_difference() {
    let p = parse_uni("x^3", "x").unwrap();
    let r = rational_line_check(&p, &big(5)).unwrap();
    assert!(!r.has_line());
    assert!(r.rational_lines.is_empty());
    assert_eq!(r.at_identity, big(-5));
    assert_eq!(r.off_identity.unwrap().as_rational(), Some(q(-5, 1)));

    let r = rational_line_check(&p, &BigInt::zero()).unwrap();
    assert!(r.has_line());
    assert_eq!(r.rational_lines, vec![(q(1, 1), q(0, 1))]);
}

#[test]
fn shifted_cube_keeps_only_the_diagonal() {
    let p = parse_uni("x^3 + 3*x^2", "x").unwrap();
    let r = rational_line_check(&p, &BigInt::zero()).unwrap();
    assert_eq!(r.genuine_locus, RatPoly1::from_i64(&[-1, 1], "a"));
    assert_eq!(r.rational_lines, vec![(q(1, 1), q(0, 1))]);

    // oracle: at a primitive cube root, beta = alpha - 1 and p(t) - p(alpha t + beta) is not 0
    let coeffs = [0.0, 0.0, 3.0, 1.0];
    for sign in [1.0, -1.0] {
        let alpha = C(-0.5, sign * 3f64.sqrt() / 2.0);
        let beta = alpha.add(C(-1.0, 0.0));
        let worst = (0..4)
            .map(|t| {
                let t = C(t as f64, 0.0);
                horner(&coeffs, t).add(horner(&coeffs, alpha.mul(t).add(beta)).scale(-1.0)).abs()
            })
            .fold(0.0, f64::max);
        assert!(worst > 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn difference_curves_have_lines_only_at_zero(
        coeffs in prop::collection::vec(-6i64..=6, 2..6),
        lead in prop::sample::select(vec![-3i64, -2, -1, 1, 2, 3]),
        k in -40i64..=40,
    ) {
        let mut c = coeffs.clone();
        c.push(lead);
        let p = IntPoly1::from_i64(&c, "x");
        let r = rational_line_check(&p, &big(k)).unwrap();
        prop_assert_eq!(r.has_line(), k == 0);
        prop_assert_eq!(r.at_identity, big(-k));
        if let Some(off) = &r.off_identity {
            prop_assert_eq!(off.as_rational(), Some(q(-k, 1)));
        }
        if k == 0 {
            prop_assert!(r.rational_lines.contains(&(q(1, 1), q(0, 1))));
        }
    }
}

fn slopes(c: &[LineCandidate]) -> Vec<&LineCandidate> {
    c.iter().filter(|c| matches!(c, LineCandidate::Slope { .. })).collect()
}

#[test]
fn quartic_level_lines() {
    let f = bivariate("x^4 - y^4");
    let c = classify_level_lines(&f).unwrap();
    assert_eq!(c.len(), 3);
    let mut rational: Vec<_> = c.iter().filter_map(|c| c.rational_slope()).collect();
    rational.sort();
    assert_eq!(rational, vec![(q(-1, 1), q(0, 1), q(0, 1)), (q(1, 1), q(0, 1), q(0, 1))]);
    for cand in &c {
        let LineCandidate::Slope { alpha, beta, level, genuine } = cand else {
            panic!("no vertical candidate expected")
        };
        assert!(genuine);
        assert!(beta.is_zero());
        assert!(level.is_zero());
        assert!(alpha.modulus().degree() == Some(1) || **alpha.modulus() == RatPoly1::from_i64(&[1, 0, 1], "y"));
    }
    // oracle: f(t, i t) = t^4 - t^4 = 0 at t = 1..4
    let i = C(0.0, 1.0);
    for t in 1..5 {
        let t = C(t as f64, 0.0);
        let y = i.mul(t);
        let v = t.mul(t).mul(t).mul(t).add(y.mul(y).mul(y).mul(y).scale(-1.0));
        assert!(v.abs() < 1e-9);
    }
    assert!(rational_lines_in_level(&f, &big(1)).unwrap().is_empty());
    assert_eq!(rational_lines_in_level(&f, &big(0)).unwrap().len(), 2);
}

#[test]
fn cubic_plus_one_lines_sit_at_level_one() {
    let f = bivariate("x^3 - y^3 + 1");
    let c = classify_level_lines(&f).unwrap();
    assert_eq!(slopes(&c).len(), 2);
    for cand in &c {
        assert!(cand.is_genuine());
        assert_eq!(cand.rational_level(), Some(q(1, 1)));
    }
    // oracle: f(t, w t) = t^3 (1 - w^3) + 1 with w^3 = 1
    let w = C(-0.5, 3f64.sqrt() / 2.0);
    for t in 0..4 {
        let t = C(t as f64, 0.0);
        let y = w.mul(t);
        let v = t.mul(t).mul(t).add(y.mul(y).mul(y).scale(-1.0)).add(C(1.0, 0.0));
        assert!((v.0 - 1.0).abs() < 1e-9 && v.1.abs() < 1e-9);
    }
}

#[test]
fn vertical_candidates() {
    let f = bivariate("x^3 - y^3 + x*y");
    let c = classify_level_lines(&f).unwrap();
    assert!(c.iter().all(|c| matches!(c, LineCandidate::Slope { .. })));

    // x^3 + x y^2 has x | f_3; gamma = -f_2(0,1) / (d f_3/dx)(0,1)
    let f = bivariate("x^3 + x*y^2 + y^2 + x");
    let c = classify_level_lines(&f).unwrap();
    let v: Vec<_> = c.iter().filter(|c| matches!(c, LineCandidate::Vertical { .. })).collect();
    assert_eq!(v.len(), 1);
    let LineCandidate::Vertical { gamma, level, genuine } = v[0] else { unreachable!() };
    assert_eq!(*gamma, q(-1, 1));
    assert_eq!(*level, q(-2, 1));
    assert!(genuine);
    // f(-1, t) = -1 - t^2 + t^2 - 1 = -2
    for t in -3..4 {
        assert_eq!(f.eval_i64(&[-1, t]), big(-2));
    }

    let f = bivariate("x^3 + x*y^2 + y^2 + 2*y");
    let c = classify_level_lines(&f).unwrap();
    let v = c.iter().find(|c| matches!(c, LineCandidate::Vertical { .. })).unwrap();
    assert!(!v.is_genuine());
}

#[test]
fn squarefree_precondition() {
    assert!(classify_level_lines(&bivariate("x^2*y + y + 1")).is_err());
    assert!(classify_level_lines(&bivariate("(x - y)^2*(x + y) + x")).is_err());
}

fn random_form_poly(rng: &mut ChaCha8Rng, d: u32) -> MPoly {
    let mut f = MPoly::zero(&["x", "y"]);
    for i in 0..=d {
        for j in 0..=(d - i) {
            if rng.gen_bool(0.6) || i + j == d {
                f.add_term(vec![i, j], big(rng.gen_range(-3..=3)));
            }
        }
    }
    f
}

fn squarefree_top(f: &MPoly) -> bool {
    match f.total_degree() {
        Some(d) if d >= 2 => binary_form_discriminant(&f.homogeneous_part(d)).map(|x| !x.is_zero()).unwrap_or(false),
        _ => false,
    }
}

/// Checks every emitted candidate against its defining identities.
fn check_candidates(f: &MPoly, c: &[LineCandidate]) {
    let d = f.total_degree().unwrap();
    let top = f.homogeneous_part(d);
    let next = f.homogeneous_part(d - 1);
    for cand in c {
        match cand {
            LineCandidate::Slope { alpha, beta, level, genuine } => {
                let one = elem_const(alpha, BigRational::one());
                assert!(alg_eval(&top, &one, alpha).is_zero());
                let dy = top.partial(1);
                let lhs = beta.mul(&alg_eval(&dy, &one, alpha)).add(&alg_eval(&next, &one, alpha));
                assert!(lhs.is_zero());
                let zero = elem_const(alpha, BigRational::zero());
                assert_eq!(alg_eval(f, &zero, beta), *level);
                // value minus level along the line at d + 1 points
                let mut locus = (**alpha.modulus()).clone();
                for t in 0..=d as i64 {
                    let tt = elem_const(alpha, q(t, 1));
                    let y = alpha.mul(&tt).add(beta);
                    let diff = alg_eval(f, &tt, &y).sub(level);
                    if *genuine {
                        assert!(diff.is_zero());
                    }
                    locus = locus.gcd(&diff.zero_locus()).monic();
                }
                if !genuine {
                    assert_eq!(locus.degree(), Some(0));
                }
            }
            LineCandidate::Vertical { gamma, level, genuine } => {
                assert!(top.coeff(&[0, d]).is_zero());
                let vals: Vec<_> = (0..=d as i64)
                    .map(|t| f.eval_rat(&[gamma.clone(), q(t, 1)]))
                    .collect();
                assert_eq!(vals[0], *level);
                assert_eq!(vals.iter().all(|v| v == level), *genuine);
            }
        }
    }
}

#[test]
fn candidates_satisfy_their_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut done = 0;
    while done < 40 {
        let d = rng.gen_range(2..=4);
        let f = random_form_poly(&mut rng, d);
        if !squarefree_top(&f) {
            continue;
        }
        let c = classify_level_lines(&f).unwrap();
        check_candidates(&f, &c);
        done += 1;
    }
}

/// `f = (v y - u x - w) Q(x, y) + c`, so `y = (u x + w)/v` lies at level `c`.
fn with_planted_line(rng: &mut ChaCha8Rng, d: u32) -> MPoly {
    let (u, v, w) = (rng.gen_range(-4..=4), rng.gen_range(1..=4), rng.gen_range(-4..=4));
    let lin = MPoly::from_i64(&["x", "y"], &[(&[1, 0], -u), (&[0, 1], v), (&[0, 0], -w)]);
    let qpoly = random_form_poly(rng, d - 1);
    let c = MPoly::from_i64(&["x", "y"], &[(&[0, 0], rng.gen_range(-5..=5))]);
    &(&lin * &qpoly) + &c
}

fn is_constant_along(vals: &[BigRational]) -> bool {
    vals.iter().all(|v| *v == vals[0])
}

#[test]
fn brute_force_lines_are_all_classified() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut tried = 0;
    let mut found_any = 0;
    while tried < 50 {
        let d = rng.gen_range(2..=4);
        let f = if tried % 2 == 0 {
            random_form_poly(&mut rng, d)
        } else {
            with_planted_line(&mut rng, d)
        };
        if !squarefree_top(&f) {
            continue;
        }
        tried += 1;
        let d = f.total_degree().unwrap() as i64;
        let cands = classify_level_lines(&f).unwrap();
        let genuine: Vec<_> = cands.iter().filter(|c| c.is_genuine()).collect();
        let mut fracs = Vec::new();
        for n in -4i64..=4 {
            for m in 1i64..=4 {
                fracs.push(q(n, m));
            }
        }
        fracs.sort();
        fracs.dedup();
        for a in &fracs {
            for b in &fracs {
                let vals: Vec<_> = (0..=d)
                    .map(|t| {
                        let t = q(t, 1);
                        f.eval_rat(&[t.clone(), a * &t + b])
                    })
                    .collect();
                if is_constant_along(&vals) {
                    found_any += 1;
                    assert!(
                        genuine.iter().any(|c| c.rational_slope() == Some((a.clone(), b.clone(), vals[0].clone()))),
                        "missed y = {a} x + {b} on {f}"
                    );
                }
            }
            let vals: Vec<_> = (0..=d).map(|t| f.eval_rat(&[a.clone(), q(t, 1)])).collect();
            if is_constant_along(&vals) {
                found_any += 1;
                assert!(
                    genuine.iter().any(|c| matches!(c, LineCandidate::Vertical { gamma, .. } if gamma == a)),
                    "missed x = {a} on {f}"
                );
            }
        }
    }
    assert!(found_any >= 10, "only {found_any} lines found");
}

#[test]
fn gamma_lines_when_every_level_is_k() {
    // lines y = ±sqrt(2)(x + 1) lie at level 2 = k; no rational lines
    let f = bivariate("(y^2 - 2*(x + 1)^2)*(x^2 + y^2 + 1) + 2");
    let g = bivariate("x^3 + y^3");
    let inst = GeneralInstance::new(f, g, big(1), big(1), big(2), 30).unwrap();
    let c = classify_level_lines(&inst.f).unwrap();
    assert!(c.iter().any(|c| c.is_genuine()));
    for n in 1..=5 {
        let r = gamma_n_line_report(&inst, &big(n)).unwrap();
        assert!(r.lines.is_empty());
        assert_eq!(r.total_points, 0);
        assert!(r.single_point_lines >= 1);
    }
    assert!(check_hypotheses(&inst).unwrap().no_rational_line == Some(true));
}

#[test]
fn gamma_line_report_on_the_diagonal() {
    // p(x) = x^5 + x, k = -(p(2) - p(1)) = -32: x3 = 2, n = 1 gives the line x2 = x1
    let inst = instances::with_bound(&instances::quintic_difference(-32), 20);
    let r = gamma_n_line_report(&inst, &big(1)).unwrap();
    assert_eq!(r.lines.len(), 1);
    assert_eq!(r.lines[0].x3, vec![big(2)]);
    assert_eq!(r.lines[0].points, 20);
    assert_eq!(r.total_points, 20);
    let r = gamma_n_line_report(&inst, &big(2)).unwrap();
    assert_eq!(r.total_points, 0);
    // direct count of (x1, x3) with x1^5 + x1 - x1^5 - x1 = (x3 - n) g(x3, n) - 32 over the box
    let mut direct = 0u64;
    let p = |x: i64| x.pow(5) + x;
    for n in 1..=20i64 {
        for x3 in 1..=20i64 {
            if p(x3) - p(n) == 32 {
                direct += 20;
            }
        }
    }
    assert_eq!(gamma_line_points_total(&inst).unwrap(), direct);
}

#[test]
fn gamma_line_points_grow_slowly() {
    let mut pairs = Vec::new();
    for b in [25u64, 50, 100, 200] {
        let inst = instances::with_bound(&instances::quintic_difference(-32), b);
        pairs.push((b, BigUint::from(gamma_line_points_total(&inst).unwrap())));
    }
    let fit = fit_exponent(&pairs).unwrap();
    assert!(fit.slope <= 1.65, "slope {}", fit.slope);
}

#[test]
fn cofactor_level_counts_grow_slowly() {
    let inst = instances::quartic_difference(1);
    let rs = inst.right_side();
    for l in [1i64, 15, 65, -80] {
        let pairs: Vec<_> = [50u64, 100, 200, 400]
            .iter()
            .map(|&b| (b, curve_count_in_box(&rs, &big(l), b).unwrap().count))
            .collect();
        if pairs.iter().all(|(_, c)| c.is_zero()) {
            continue;
        }
        if let Ok(fit) = fit_exponent(&pairs) {
            assert!(fit.slope <= 0.65, "l = {l}: slope {}", fit.slope);
        }
    }
}

#[test]
fn critical_values_of_the_quartic() {
    let cv = critical_value_poly(&bivariate("x^4 - y^4")).unwrap();
    assert_eq!(cv.poly, IntPoly1::from_i64(&[0, 1], "v"));
    // x^3 - 3x + y^2: critical points (±1, 0) with values ∓2
    let cv = critical_value_poly(&bivariate("x^3 - 3*x + y^2")).unwrap();
    for v in [-2i64, 2] {
        assert!(cv.poly.eval(&big(v)).is_zero());
    }
}

fn gamma_proj(inst: &GeneralInstance, n: i64) -> MPoly {
    let vars = ["x1", "x2", "x3"];
    let d = inst.degree();
    let f = MPoly::from_terms(&vars, inst.f.terms().iter().map(|(e, c)| (vec![e[0], e[1], 0], c.clone())));
    let g = inst.right_side().slice(0, &[BigInt::zero(), big(n)]);
    let g = MPoly::from_uni(&g, 2, &vars);
    let affine = &(&f - &g) - &f.constant_like(inst.k.clone());
    affine.homogenize("w", d)
}

fn has_singular_point(poly: &MPoly, p: u64) -> bool {
    let f = ReducedPoly::new(poly, p);
    let parts: Vec<_> = (0..4).map(|i| ReducedPoly::new(&poly.partial(i), p)).collect();
    let sing = |pt: &[u64]| f.eval(pt) == 0 && parts.iter().all(|q| q.eval(pt) == 0);
    if sing(&[1, 0, 0, 0]) {
        return true;
    }
    for a in 0..p {
        if sing(&[a, 1, 0, 0]) {
            return true;
        }
        for b in 0..p {
            if sing(&[a, b, 1, 0]) {
                return true;
            }
            for c in 0..p {
                if sing(&[a, b, c, 1]) {
                    return true;
                }
            }
        }
    }
    false
}

fn census_soundness(inst: &GeneralInstance) {
    let census = singular_census(inst, Family::Gamma, 50).unwrap();
    let bad = &census.bad_divisor;
    let p = (51u64..).find(|&p| is_prime(p) && !(bad % BigInt::from(p)).is_zero()).unwrap();
    let mut checked = 0;
    for n in 1..=50i64 {
        if census.may_be_singular_mod(&big(n), p) {
            continue;
        }
        checked += 1;
        assert!(!has_singular_point(&gamma_proj(inst, n), p), "n = {n}, p = {p}");
    }
    assert!(checked >= 45);
}

#[test]
fn gamma_census_is_sound_mod_p() {
    census_soundness(&instances::quartic_difference(1));
    census_soundness(&instances::cubic_difference(3));
    census_soundness(&instances::shifted_cofactor(2));
}

#[test]
fn gamma_census_leading_coefficient() {
    for inst in [
        instances::quartic_difference(1),
        instances::cubic_difference(2),
        instances::quintic_difference(1),
    ] {
        let c = singular_census(&inst, Family::Gamma, 100).unwrap();
        assert_eq!(c.leading_coefficient, c.predicted_leading_coefficient);
        assert_eq!(c.core_degree, c.predicted_degree);
        assert!(!c.disc_polynomial.is_zero());
    }
    // x^4 - y^4: (t - 1)(t^3 + t^2 + t + 1) = t^4 - 1
    let c = singular_census(&instances::quartic_difference(1), Family::Gamma, 100).unwrap();
    assert_eq!(c.predicted_leading_coefficient, big(-256));

    // (t - 1)(t^3 - 1) has a double root, so the limit vanishes and the degree drops
    let c = singular_census(&instances::shifted_cofactor(1), Family::Gamma, 100).unwrap();
    assert!(c.predicted_leading_coefficient.is_zero());
    assert!(c.core_degree < c.predicted_degree);
}

#[test]
fn census_roots_divide_the_constant_term() {
    for (inst, fam) in [
        (instances::quartic_difference(1), Family::Gamma),
        (instances::quartic_difference(-1), Family::Gamma),
        (instances::cubic_difference(2), Family::Gamma),
        (instances::quartic_difference(1), Family::K),
        (instances::cubic_difference(1), Family::K),
        (instances::quartic_difference(3), Family::P),
    ] {
        let c = singular_census(&inst, fam, 1000).unwrap();
        let c0 = c.disc_polynomial.coeff(0);
        for r in &c.roots {
            assert!(c.may_be_singular(r));
            if !c0.is_zero() && c.top_singular.as_ref() != Some(r) {
                assert!((&c0 % r).is_zero(), "{r} does not divide {c0}");
            }
        }
    }
}

#[test]
fn k_family_leading_coefficient() {
    for inst in [instances::quartic_difference(1), instances::cubic_difference(1), instances::quintic_difference(2)] {
        let c = singular_census(&inst, Family::K, 50).unwrap();
        assert_eq!(c.leading_coefficient, c.predicted_leading_coefficient);
        assert_eq!(c.core_degree, c.predicted_degree);
    }
}

#[test]
fn p_family_census() {
    let inst = instances::quartic_difference(1);
    let grad = gradient_form(&inst);
    assert_eq!(grad, bivariate("4*x^2 + 4*x*y + 4*y^2"));
    assert!(!binary_form_discriminant(&grad).unwrap().is_zero());
    let c = singular_census(&inst, Family::P, 1000).unwrap();
    assert!(!c.disc_polynomial.is_zero());
    assert_eq!(c.leading_coefficient, c.predicted_leading_coefficient);
    assert_eq!(c.core_degree, 4);

    let c = singular_census(&instances::cubic_difference(1), Family::P, 1000).unwrap();
    assert!(c.roots.is_empty());
    assert_eq!(c.predicted_degree, 0);
}

#[test]
fn hypotheses_of_the_quartic_deduction() {
    let r = check_hypotheses(&instances::quartic_difference(1)).unwrap();
    assert!(r.passes(), "{r:?}");
    assert_eq!(r.gradient_form_squarefree, Some(true));

    // f = (y - x - 1)(x^2 + y^2 + 3) + 3 contains y = x + 1 at level 3
    let f = bivariate("(y - x - 1)*(x^2 + y^2 + 3) + 3");
    let g = bivariate("x^2 + y^2");
    let inst = GeneralInstance::new(f, g, big(1), big(2), big(3), 10).unwrap();
    let r = check_hypotheses(&inst).unwrap();
    assert_eq!(r.no_rational_line, Some(false));
    assert_eq!(r.lines.len(), 1);
    assert!(!r.passes());
}

#[test]
fn modulus_is_shared_by_candidate_parts() {
    let c = classify_level_lines(&bivariate("x^4 - y^4")).unwrap();
    for cand in c {
        if let LineCandidate::Slope { alpha, beta, level, .. } = cand {
            assert!(Arc::ptr_eq(alpha.modulus(), beta.modulus()));
            assert!(Arc::ptr_eq(alpha.modulus(), level.modulus()));
        }
    }
}
