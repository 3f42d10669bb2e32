//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use polyenergy::congruence::*;
use polyenergy::energy::*;
use polyenergy::energy::GeneralInstance;
use polyenergy::ffield::*;
use polyenergy::fit::fit_exponent;
use polyenergy::geometry::{gradient_form, singular_census, Family};
use polyenergy::instances;
use polyenergy::polyarith::{binary_form_discriminant, parse_poly, IntPoly1};
use polyenergy::sieve::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn random_poly(rng: &mut ChaCha8Rng, d: usize) -> IntPoly1 {
    let mut c: Vec<i64> = (0..=d).map(|_| rng.gen_range(-9..=9)).collect();
    if c[d] == 0 {
        c[d] = 1;
    }
    IntPoly1::from_i64(&c, "x")
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let budget = Budget::default();
    for _ in 0..100 {
        let d = rng.gen_range(3..=5);
        let f = random_poly(&mut rng, d);
        let k = rng.gen_range(-50..=50);
        let b = rng.gen_range(1..=20);
        let inst = EnergyInstance::new(f.clone(), big(k), b).map_err(|e| e.to_string())?;
        let a = energy_mitm(&inst, &budget).map_err(|e| e.to_string())?.count;
        let c = energy_bruteforce(&inst, &budget).map_err(|e| e.to_string())?.count;
        ensure(a == c, format!("{f} k={k} B={b}: {a} vs {c}"))?;
    }
    Ok("100 instances agree".into())
}

fn conservation() -> Outcome {
    let budget = Budget::default();
    for text in ["x^3", "x^4 - 2*x"] {
        let f = polyenergy::polyarith::parse_uni(text, "x").unwrap();
        let h = energy_histogram(&f, 50, &budget).map_err(|e| e.to_string())?;
        let total: BigUint = h.values().sum();
        ensure(total == BigUint::from(50u32).pow(4), format!("{text}: total {total}"))?;
    }
    Ok("sum over k equals 50^4".into())
}

fn diagonal_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let budget = Budget::default();
    let b = 100u64;
    // distinct tuples (x,y,x,y) and (x,y,y,x): B^2 + B^2 - B
    let mut distinct = std::collections::HashSet::new();
    for x in 1..=b {
        for y in 1..=b {
            distinct.insert((x, y, x, y));
            distinct.insert((x, y, y, x));
        }
    }
    ensure(BigUint::from(distinct.len()) == diagonal_count(b), "diagonal count")?;
    let mut least = None::<BigUint>;
    for _ in 0..20 {
        let d = rng.gen_range(3..=5);
        let f = random_poly(&mut rng, d);
        let inst = EnergyInstance::new(f.clone(), BigInt::zero(), b).map_err(|e| e.to_string())?;
        let e = energy_mitm(&inst, &budget).map_err(|e| e.to_string())?.count;
        ensure(e >= diagonal_count(b), format!("{f}: {e}"))?;
        least = Some(least.map_or(e.clone(), |l: BigUint| l.min(e)));
    }
    Ok(format!("min E(100;0) = {} >= {}", least.unwrap(), diagonal_count(b)))
}

fn paucity() -> Outcome {
    let budget = Budget::default();
    let bs = [100u64, 200, 400, 800, 1600];
    let mut out = Vec::new();
    for text in ["x^3", "x^4"] {
        let f = polyenergy::polyarith::parse_uni(text, "x").unwrap();
        let scan = exponent_scan(&bs, |b| energy_mitm(&EnergyInstance::new(f.clone(), big(1), b)?, &budget))
            .map_err(|e| e.to_string())?;
        ensure(scan.fit.slope <= 1.9, format!("{text}: slope {:.4}", scan.fit.slope))?;
        out.push(format!("{text} slope {:.4}", scan.fit.slope));
    }
    Ok(out.join(", "))
}

fn bombieri_pila() -> Outcome {
    let f = parse_poly("x^4 - y^4", &["x", "y"]).unwrap();
    let bs = [200u64, 400, 800, 1600, 3200];
    let mut out = Vec::new();
    for k in [1i64, 2, 15, 65] {
        let counts: Vec<(u64, BigUint)> = bs
            .iter()
            .map(|&b| curve_count_in_box(&f, &big(k), b).map(|c| (b, c.count)))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        if counts.iter().all(|(_, c)| c.is_zero()) {
            out.push(format!("k={k} no points"));
            continue;
        }
        let fit = fit_exponent(&counts).map_err(|e| e.to_string())?;
        ensure(fit.slope <= 0.4, format!("k={k}: slope {:.4}", fit.slope))?;
        out.push(format!("k={k} slope {:.4}", fit.slope));
    }
    Ok(out.join(", "))
}

fn exponential_sums() -> Outcome {
    let s = build_sieve_surface(&instances::cubic_difference(1), &big(1)).map_err(|e| e.to_string())?;
    for p in [11u64, 31, 61] {
        let mut total = 0.0;
        for m in 0..p {
            for n in 0..p {
                let v = sigma_t(1, p, &big(m as i64), &big(n as i64), &s).map_err(|e| e.to_string())?;
                total += v.re * v.re + v.im * v.im;
            }
        }
        let rebuilt = (total / (p * p) as f64).round();
        let exact = sigma_t(2, p, &big(0), &big(0), &s).map_err(|e| e.to_string())?.exact.unwrap();
        ensure(BigInt::from(rebuilt as i64) == exact, format!("Parseval p={p}: {rebuilt} vs {exact}"))?;
    }
    let primes = primes_up_to(13);
    let mut checked = 0u64;
    for inst in [instances::quartic_difference(1), instances::cubic_difference(2)] {
        let engine = PhiEngine::new(&inst);
        for h in (-10i64..=10).filter(|&h| h != 0) {
            let s = build_sieve_surface(&inst, &big(h)).map_err(|e| e.to_string())?;
            for &p in &primes {
                for &q in &primes {
                    if h % p as i64 == 0 || h % q as i64 == 0 {
                        continue;
                    }
                    let l = (p * q) as i64 * h.abs();
                    let tol = 1e-6 * (l * l) as f64;
                    for (m, n) in [(0i64, 0i64), (1, -2), (p as i64, 3 * q as i64), (l / 2, 7)] {
                        let direct = psi_sum_direct(&big(m), &big(n), p, q, &s).map_err(|e| e.to_string())?;
                        for i in 0..3u32 {
                            for j in 0..3u32 {
                                let f = psi_sum_factorized(i, j, &big(m), &big(n), p, q, &s, &engine)
                                    .map_err(|e| e.to_string())?;
                                let gap = f.distance(&direct[i as usize][j as usize]);
                                ensure(gap <= tol, format!("Psi p={p} q={q} h={h} ({m},{n}) ({i},{j}) gap {gap}"))?;
                                checked += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(format!("Parseval p in {{11,31,61}}; {checked} factorized Psi values"))
}

fn two_path_sieve() -> Outcome {
    let mut worst = 0.0f64;
    let inst = instances::with_bound(&instances::quartic_difference(1), 40);
    for h in [2i64, 3, 5] {
        let ctx = SieveContext::new(&inst, &big(h), 20, 1).map_err(|e| e.to_string())?;
        for p in [3u64, 5, 7] {
            for q in [3u64, 5, 7] {
                if h % p as i64 == 0 || h % q as i64 == 0 {
                    continue;
                }
                let direct = s_direct_table(&ctx, p, q).map_err(|e| e.to_string())?;
                let completed = s_completed_table(&ctx, p, q).map_err(|e| e.to_string())?;
                let tol = 1e-6 * (p * q) as f64 * h as f64 * 40.0;
                for i in 0..3 {
                    for j in 0..3 {
                        let gap = (completed[i][j] - num_complex::Complex64::new(direct[i][j] as f64, 0.0)).norm();
                        ensure(gap <= tol, format!("h={h} p={p} q={q} ({i},{j}) gap {gap}"))?;
                        worst = worst.max(gap / tol);
                    }
                }
            }
        }
    }
    Ok(format!("largest gap / tolerance = {worst:.2e}"))
}

fn sieve_table() -> Outcome {
    let golden: std::collections::BTreeMap<String, std::collections::BTreeMap<String, [[i64; 3]; 3]>> =
        serde_json::from_str(include_str!("data/c_table_golden.json")).map_err(|e| e.to_string())?;
    for d in [3u32, 4] {
        for alpha in 1..=5i64 {
            let want = golden[&d.to_string()][&alpha.to_string()];
            ensure(c_table(alpha, d) == want, format!("alpha={alpha} d={d}"))?;
        }
    }
    Ok("10 tables match".into())
}

fn congruence_counting() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let polys = common::random_congruence_polys(&mut rng, 200);
    for m in [2u64, 9, 97, 1024, 3125] {
        let batch = common::naive_root_counts(&polys[..13], m);
        for (q, got) in polys[..13].iter().zip(batch) {
            ensure(got == common::naive_root_count(q, m), format!("batched scan of {q} mod {m}"))?;
        }
    }
    let moduli: Vec<(u64, u32)> = primes_up_to(100_000)
        .into_iter()
        .flat_map(|p| (1..).map(move |l| (p, l)).take_while(|&(p, l)| p.checked_pow(l).is_some_and(|m| m <= 100_000)))
        .collect();
    for &(p, l) in &moduli {
        let naive = common::naive_root_counts(&polys, p.pow(l));
        for (q, want) in polys.iter().zip(naive) {
            let got = count_roots_mod_prime_power(&CongruenceQuery::new(q.clone(), p, l).unwrap());
            ensure(got == BigUint::from(want), format!("{q} mod {p}^{l}: {got} vs {want}"))?;
        }
    }
    let mut worst = 0.0f64;
    for p in [2u64, 3, 5, 7] {
        for d in 2..=5usize {
            for m in 0..3u32 {
                let mut c = vec![0i64; d + 1];
                c[d] = p.pow(m) as i64;
                let q = IntPoly1::from_i64(&c, "x");
                for l in 1..=12u32 {
                    let r = padic_ratio(&CongruenceQuery::new(q.clone(), p, l).unwrap()).map_err(|e| e.to_string())?;
                    worst = worst.max(r);
                }
            }
        }
    }
    ensure(worst <= 1.0 + 1e-9, format!("p-adic ratio {worst}"))?;
    Ok(format!("{} moduli x 200 polynomials; p-adic ratio <= {worst:.6}", moduli.len()))
}

fn exclusion_divisor(inst: &GeneralInstance) -> BigInt {
    let d = inst.degree();
    let g_top = inst.g.homogeneous_part(d - 1).eval(&[inst.b.clone(), inst.a.clone()]);
    let disc = binary_form_discriminant(&inst.f.homogeneous_part(d)).expect("binary form");
    big(6) * &inst.a * &inst.b * g_top * inst.f.content() * disc
}

fn delta_soundness() -> Outcome {
    let mut worst = 0.0f64;
    let mut lines = 0;
    for k in [1i64, 5 * 7 * 11 * 13 * 17] {
        let inst = instances::quartic_difference(k);
        let exclusion = exclusion_divisor(&inst);
        for p in primes_up_to(37).into_iter().filter(|&p| p > 4) {
            if (&exclusion % BigInt::from(p)).is_zero() {
                continue;
            }
            for m in -5i64..=5 {
                for n in -5i64..=5 {
                    if m % p as i64 == 0 && n % p as i64 == 0 {
                        continue;
                    }
                    let cert = delta_f(&inst.f, &inst.k, &big(m), &big(n)).map_err(|e| e.to_string())?;
                    worst = worst.max(cert.bound_ratio());
                    if lines_mod_p(&inst.f, &inst.k, &big(m), &big(n), p).map_err(|e| e.to_string())?.is_empty() {
                        continue;
                    }
                    lines += 1;
                    ensure((&cert.value % BigInt::from(p)).is_zero(), format!("k={k} p={p} ({m},{n})"))?;
                }
            }
        }
    }
    ensure(worst <= 24576.0 + 1e-6, format!("|Delta| ratio {worst}"))?;
    ensure(lines > 0, "no lines found mod any p")?;
    Ok(format!("{lines} lines mod p, all divide Delta; largest ratio to the bound {worst:.0}"))
}

fn census() -> Outcome {
    let mut out = Vec::new();
    for (name, inst) in [
        ("quartic", instances::quartic_difference(1)),
        ("cubic", instances::cubic_difference(2)),
        ("quintic", instances::quintic_difference(1)),
    ] {
        for fam in [Family::Gamma, Family::K] {
            let c = singular_census(&inst, fam, 100).map_err(|e| e.to_string())?;
            ensure(
                c.leading_coefficient == c.predicted_leading_coefficient && c.core_degree == c.predicted_degree,
                format!("{name} {fam:?}: {} vs {}", c.leading_coefficient, c.predicted_leading_coefficient),
            )?;
        }
        out.push(name);
    }
    let inst = instances::quartic_difference(1);
    let grad = gradient_form(&inst);
    let want = parse_poly("4*x^2 + 4*x*y + 4*y^2", &["x", "y"]).unwrap();
    ensure(grad == want, format!("gradient form {grad}"))?;
    let p = singular_census(&inst, Family::P, 1000).map_err(|e| e.to_string())?;
    ensure(!p.disc_polynomial.is_zero(), "P census vanishes identically")?;
    ensure(p.leading_coefficient == p.predicted_leading_coefficient, "P census leading coefficient")?;
    Ok(format!(
        "Gamma and K limits exact for {}; P census of x^4 has {} roots in [-1000,1000]",
        out.join(", "),
        p.roots.len()
    ))
}

fn hasse_weil() -> Outcome {
    let e = parse_poly("y^2 - x^3 - x - 1", &["x", "y"]).unwrap();
    let mut out = Vec::new();
    for p in [5u64, 7, 11, 13] {
        let n = affine_point_count(&[e.clone()], p).map_err(|e| e.to_string())? + 1;
        let dev = n as i64 - p as i64 - 1;
        ensure(dev * dev <= 4 * p as i64, format!("p={p}: #E={n}"))?;
        out.push(format!("#E(F_{p})={n}"));
    }
    Ok(out.join(", "))
}

fn exponent_bookkeeping() -> Outcome {
    for d in 3..=10_000u32 {
        let s = exponent_calculator(d).map_err(|e| e.to_string())?;
        ensure(s.verified(), format!("d={d}"))?;
        ensure(s.sieve_below_target, format!("sieve exponent at d={d}"))?;
        ensure(s.balance_exponent == s.sieve_exponent_exact, format!("balance at d={d}"))?;
    }
    let s5 = exponent_calculator(5).unwrap();
    Ok(format!("d=5: {:.6} < {:.6}; balance exact for 3 <= d <= 10^4", s5.determinant_exponent, s5.target))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("oracle equivalence", oracle_equivalence),
        ("conservation", conservation),
        ("diagonal bound", diagonal_bound),
        ("paucity regression", paucity),
        ("Bombieri-Pila regression", bombieri_pila),
        ("exponential-sum identities", exponential_sums),
        ("two-path sieve sums", two_path_sieve),
        ("sieve table", sieve_table),
        ("congruence counting", congruence_counting),
        ("Delta_f soundness", delta_soundness),
        ("census correctness", census),
        ("Hasse-Weil spot check", hasse_weil),
        ("exponent bookkeeping", exponent_bookkeeping),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panic: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1} s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1} s): {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
