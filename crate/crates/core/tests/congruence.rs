mod common;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use polyenergy::congruence::*;
use polyenergy::ffield::{is_prime, primes_up_to, roots_mod_p, FpPoly, PhiEngine};
use polyenergy::instances;
use polyenergy::polyarith::{parse_poly, IntPoly1, MPoly, RatPoly1};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

fn count(q: &IntPoly1, p: u64, l: u32) -> u64 {
    count_roots_mod_prime_power(&CongruenceQuery::new(q.clone(), p, l).unwrap())
        .to_u64()
        .unwrap()
}

#[test]
fn root_count_examples() {
    assert_eq!(count(&IntPoly1::from_i64(&[0, 0, 1], "x"), 3, 2), 3);
    assert_eq!(count(&IntPoly1::from_i64(&[-1, 1], "x"), 5, 4), 1);
    assert_eq!(count(&IntPoly1::zero("x"), 7, 3), 343);
    assert_eq!(count(&IntPoly1::from_i64(&[9], "x"), 3, 2), 9);
    assert_eq!(count(&IntPoly1::from_i64(&[9], "x"), 3, 3), 0);
    assert!(CongruenceQuery::new(IntPoly1::x("x"), 9, 2).is_err());
    assert!(CongruenceQuery::new(IntPoly1::x("x"), 3, 0).is_err());
}

#[test]
fn valuations() {
    assert_eq!(valuation(&big(0), 3), None);
    assert_eq!(valuation(&big(-54), 3), Some(3));
    assert_eq!(valuation(&big(7), 2), Some(0));
    assert_eq!(content_valuation(&IntPoly1::from_i64(&[12, 0, 8], "x"), 2), Some(2));
}

#[test]
fn hensel_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    let polys = common::random_congruence_polys(&mut rng, 60);
    let moduli: Vec<(u64, u32)> = primes_up_to(60)
        .into_iter()
        .flat_map(|p| (1..).map(move |l| (p, l)).take_while(|&(p, l)| p.pow(l) <= 4000))
        .collect();
    for q in &polys {
        for &(p, l) in &moduli {
            assert_eq!(count(q, p, l), common::naive_root_count(q, p.pow(l)), "{q} mod {p}^{l}");
        }
    }
}

#[test]
fn hensel_matches_enumeration_for_large_primes() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let polys = common::random_congruence_polys(&mut rng, 6);
    for p in [16411u64, 20011, 65537] {
        for q in &polys {
            assert_eq!(count(q, p, 1), common::naive_root_count(q, p));
        }
    }
}

#[test]
fn roots_by_splitting_agree_with_scan() {
    let p = 40009;
    assert!(is_prime(p));
    // (x - 3)(x - 17)(x - 40000)^2 (x^2 + 1): 40009 = 1 mod 4, so x^2 + 1 splits as well
    let mut f = FpPoly::new(vec![1], p);
    for r in [3u64, 17, 40000, 40000] {
        f = f.mul(&FpPoly::new(vec![p - r, 1], p));
    }
    f = f.mul(&FpPoly::new(vec![1, 0, 1], p));
    let scanned: Vec<u64> = (0..p).filter(|&x| f.eval(x) == 0).collect();
    assert_eq!(roots_mod_p(&f), scanned);
    assert_eq!(scanned.len(), 5);
}

#[test]
fn crt_multiplicativity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let polys = common::random_congruence_polys(&mut rng, 40);
    for q in &polys {
        let (p, a) = [(2u64, 3u32), (3, 2), (5, 1), (2, 4)][rng.gen_range(0..4)];
        let (r, b) = [(7u64, 2u32), (11, 1), (13, 2), (3, 3)][rng.gen_range(0..4)];
        if p == r {
            continue;
        }
        let composite = common::naive_root_count(q, p.pow(a) * r.pow(b));
        assert_eq!(composite, count(q, p, a) * count(q, r, b), "{q}");
    }
}

fn exact_power_count(p: u64, l: u32, d: u32, m: u32) -> u64 {
    // p^m x^d = 0 mod p^l  <=>  v(x) >= ceil((l - m) / d)
    if m >= l {
        return p.pow(l);
    }
    let need = (l - m).div_ceil(d);
    p.pow(l - need.min(l))
}

#[test]
fn padic_bound_on_pure_powers() {
    for &p in &[2u64, 3, 5] {
        for d in 2..=5u32 {
            for m in 0..3u32 {
                let mut c = vec![0i64; d as usize + 1];
                c[d as usize] = p.pow(m) as i64;
                let q = IntPoly1::from_i64(&c, "x");
                for l in 1..=12u32 {
                    if p.pow(l) > 1 << 40 {
                        continue;
                    }
                    let query = CongruenceQuery::new(q.clone(), p, l).unwrap();
                    let c = count_roots_mod_prime_power(&query);
                    assert_eq!(c, BigUint::from(exact_power_count(p, l, d, m)));
                    let ratio = padic_ratio(&query).unwrap();
                    assert!(ratio <= 1.0 + 1e-9, "p={p} d={d} m={m} l={l} ratio={ratio}");
                }
            }
        }
    }
}

#[test]
fn linear_congruence_examples() {
    let c = |a: i64, b: i64, p: u64, l: u32, m: u32| count_linear_congruence(&big(a), &big(b), p, l, m);
    assert_eq!(c(1, 0, 3, 4, 2).unwrap(), BigUint::from(9u32));
    assert_eq!(c(5, 7, 3, 4, 0).unwrap(), BigUint::from(81u32));
    assert_eq!(c(1, 0, 3, 4, 5).unwrap(), BigUint::from(1u32));
    assert!(c(6, 1, 3, 2, 1).is_err());
    assert!(c(0, 1, 3, 2, 1).is_err());
}

proptest! {
    #[test]
    fn linear_congruence_by_enumeration(
        a in -200i64..200, b in -500i64..500, pi in 0usize..4, l in 1u32..5, m in 0u32..7
    ) {
        let p = [2u64, 3, 5, 7][pi];
        prop_assume!(a % p as i64 != 0);
        let pl = p.pow(l) as i64;
        let pm = p.pow(m) as i64;
        let naive = (0..pl).filter(|x| (a * x + b).rem_euclid(pm) == 0).count() as u64;
        let got = count_linear_congruence(&big(a), &big(b), p, l, m).unwrap();
        prop_assert_eq!(got, BigUint::from(naive));
    }
}

fn quartic_f() -> MPoly {
    instances::quartic_difference(1).f
}

fn poly(text: &str) -> MPoly {
    parse_poly(text, &["x", "y"]).unwrap()
}

#[test]
fn delta_leading_form_case() {
    let f = poly("3*x^4 - y^4 + x^2*y - 5");
    let cert = delta_f(&f, &big(2), &big(0), &big(1)).unwrap();
    assert_eq!(cert.case, DeltaCase::LeadingForm);
    assert_eq!(cert.value, big(3));
    assert!(!cert.swapped);
    let cert = delta_f(&f, &big(2), &big(1), &big(0)).unwrap();
    assert!(cert.swapped);
    assert_eq!(cert.value, big(-1));
    assert!(delta_f(&f, &big(2), &big(0), &big(0)).is_err());
    assert!(delta_f(&poly("(x - y)^2*(x^2 + y^2)"), &big(1), &big(1), &big(1)).is_err());
}

/// `f(x, (tau - Mx)/N)` over the rationals.
fn restricted(f: &MPoly, m: &BigInt, n: &BigInt, tau: &BigRational) -> RatPoly1 {
    let nr = BigRational::from_integer(n.clone());
    let y = RatPoly1::new(
        vec![tau / &nr, BigRational::from_integer(-m) / &nr],
        "x",
    );
    f.substitute_rat(&[RatPoly1::x("x"), y])
}

proptest! {
    #[test]
    fn expansion_coefficients_match_substitution(
        lower in proptest::collection::vec(-9i64..10, 10), mi in 1i64..4, sign in any::<bool>()
    ) {
        // top form x^4 - y^4 vanishes at (N, -M) for N = +-M
        let (m, n) = (big(mi), if sign { big(mi) } else { big(-mi) });
        let mut f = poly("x^4 - y^4");
        let mut it = lower.iter();
        for i in 0..4u32 {
            for j in 0..=(3 - i) {
                if i + j == 0 {
                    continue;
                }
                if let Some(&c) = it.next() {
                    f.add_term(vec![i, j], big(c));
                }
            }
        }
        let (num, den) = line_offset(&f, &m, &n).unwrap();
        let tau = BigRational::new(num, den);
        let direct = restricted(&f, &m, &n, &tau);
        let (a, b) = line_expansion(&f, &m, &n).unwrap();
        for j in 0..=4usize {
            prop_assert_eq!(direct.coeff(j), BigRational::new(a[j].clone(), b[j].clone()));
        }
    }
}

#[test]
fn delta_on_difference_instances_reaches_the_constant_term() {
    for (inst, pairs) in [
        (instances::quartic_difference(1), vec![(1i64, 1i64), (2, -2), (-3, 3)]),
        (instances::cubic_difference(1), vec![(1, -1), (4, -4)]),
        (instances::quintic_difference(1), vec![(1, -1), (2, -2)]),
    ] {
        for (m, n) in pairs {
            for k in [-7i64, -1, 1, 3, 40] {
                let cert = delta_f(&inst.f, &big(k), &big(m), &big(n)).unwrap();
                assert_eq!(cert.case, DeltaCase::E0MinusK, "{} ({m},{n}) k={k}", inst.f);
                assert!(!cert.value.is_zero());
                let rest = &cert.a_values[0] - big(k) * &cert.b_values[0];
                assert!(!rest.is_zero());
            }
        }
    }
}

#[test]
fn quartic_certificate_closed_form() {
    // f = x^4 - y^4, N = +-M: D = 4M^3, A_j = 0, B_0 = 24 D^4, Delta = -24 k N D^5
    let f = quartic_f();
    for m in [-3i64, -1, 1, 2, 5] {
        for n in [m, -m] {
            for k in [-5i64, 1, 9] {
                let cert = delta_f(&f, &big(k), &big(m), &big(n)).unwrap();
                let dval = big(4) * big(m).pow(3);
                let expected = big(-24) * big(k) * big(n) * dval.pow(5);
                assert_eq!(cert.value, expected);
                assert!((cert.bound_ratio() - 24576.0).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn delta_size_bound_over_random_inputs() {
    let f = quartic_f();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let (m, n) = loop {
            let m = rng.gen_range(-1000i64..=1000);
            let n = if rng.gen_bool(0.3) { m * [1, -1][rng.gen_range(0..2)] } else { rng.gen_range(-1000..=1000) };
            if m != 0 || n != 0 {
                break (m, n);
            }
        };
        let k = loop {
            let k = rng.gen_range(-50i64..=50);
            if k != 0 {
                break k;
            }
        };
        let cert = delta_f(&f, &big(k), &big(m), &big(n)).unwrap();
        assert!(!cert.value.is_zero());
        worst = worst.max(cert.bound_ratio());
    }
    assert!(worst <= 24576.0 + 1e-6, "{worst}");
}

fn exclusion_divisor(inst: &polyenergy::energy::GeneralInstance) -> BigInt {
    let top = inst.g.homogeneous_part(inst.degree() - 1);
    let g_top = top.eval(&[inst.b.clone(), inst.a.clone()]);
    let disc = polyenergy::polyarith::binary_form_discriminant(&inst.f.homogeneous_part(inst.degree())).unwrap();
    big(6) * &inst.a * &inst.b * g_top * inst.f.content() * disc
}

#[test]
fn certificates_catch_every_line_mod_p() {
    // a smooth curve f = k mod p contains no line; lines appear when p | k
    let k = 5 * 7 * 11 * 13 * 17;
    for (inst, expect_lines) in [
        (instances::quartic_difference(1), false),
        (instances::quartic_difference(k), true),
        (instances::cubic_difference(-k), true),
        (instances::quintic_difference(2 * k), true),
    ] {
        let d = inst.degree() as u64;
        let excl = exclusion_divisor(&inst);
        let mut found = 0;
        for p in primes_up_to(37).into_iter().filter(|&p| p > d) {
            if (&excl % BigInt::from(p)).is_zero() {
                continue;
            }
            for m in -3i64..=3 {
                for n in -3i64..=3 {
                    if (m % p as i64 == 0) && (n % p as i64 == 0) {
                        continue;
                    }
                    let taus = lines_mod_p(&inst.f, &inst.k, &big(m), &big(n), p).unwrap();
                    if taus.is_empty() {
                        continue;
                    }
                    found += 1;
                    let global = delta_f(&inst.f, &inst.k, &big(m), &big(n)).unwrap();
                    assert!((&global.value % BigInt::from(p)).is_zero(), "p={p} ({m},{n})");
                    let local = delta_f_at_prime(&inst.f, &inst.k, &big(m), &big(n), p).unwrap();
                    assert!((&local.value % BigInt::from(p)).is_zero(), "p={p} ({m},{n}) {:?}", local.case);
                }
            }
        }
        assert_eq!(found > 0, expect_lines, "{} = {}", inst.f, inst.k);
    }
}

#[test]
fn line_identity_mod_p() {
    // x^2 - y^2 = 0 contains x - y = 0; x^2 - y^2 = 1 contains no line x - y = tau
    let f = poly("x^2 - y^2");
    assert!(line_in_curve_mod_p(&f, &big(0), &big(1), &big(-1), 0, 7).unwrap());
    assert!(!line_in_curve_mod_p(&f, &big(0), &big(1), &big(-1), 1, 7).unwrap());
    assert!(!line_in_curve_mod_p(&f, &big(1), &big(1), &big(-1), 0, 7).unwrap());
    // vertical line x = 2 inside x - 2 = 0
    let g = poly("x");
    assert!(line_in_curve_mod_p(&g, &big(2), &big(1), &big(7), 2, 7).unwrap());
    assert_eq!(lines_mod_p(&g, &big(2), &big(1), &big(0), 5).unwrap(), vec![2]);
}

#[test]
fn phi_partial_sums() {
    let inst = instances::quartic_difference(1);
    let engine = PhiEngine::new(&inst);
    let one = phi_partial_sum(&inst, &engine, &big(1), &big(2), 1, 0.1).unwrap();
    assert!((one.value - 1.0).abs() < 1e-12);
    let mut last = 0.0;
    for h in [5u64, 20, 60] {
        let s = phi_partial_sum(&inst, &engine, &big(1), &big(2), h, 0.1).unwrap();
        assert!(s.value >= last);
        assert!(s.comparison.is_some());
        last = s.value;
    }
    assert!(phi_partial_sum(&inst, &engine, &big(0), &big(0), 3, 0.1).unwrap().comparison.is_none());
    assert!(phi_partial_sum(&inst, &engine, &big(1), &big(2), 0, 0.1).is_err());
}

#[test]
fn higher_power_counts() {
    let inst = instances::quartic_difference(1);
    let engine = PhiEngine::new(&inst);
    let rows = higher_power_rows(&inst, &engine, &[2, 3, 5]).unwrap();
    for r in &rows {
        let q = r.p.pow(r.l);
        if q > 700 {
            continue;
        }
        let target = |x: u64, y: u64| {
            let v = 8 * (x.pow(4) as i128 - y.pow(4) as i128 - 1);
            v.rem_euclid(q as i128) == 0
        };
        let direct = (0..q).flat_map(|x| (0..q).map(move |y| (x, y))).filter(|&(x, y)| target(x, y)).count() as u64;
        assert_eq!(r.count, direct, "{}^{}", r.p, r.l);
    }
    assert_eq!(rows.len(), 9);
}

#[test]
fn certificate_json_record() {
    let cert = delta_f(&quartic_f(), &big(1), &big(1), &big(1)).unwrap();
    let v = serde_json::to_value(&cert).unwrap();
    assert_eq!(v["case"], "E0-minus-k");
    assert!(v["delta"].is_string());
    assert!(cert.value.is_negative());
}
