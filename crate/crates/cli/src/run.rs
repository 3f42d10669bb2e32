//! Dispatch from a validated config to the library, producing the JSON payload.

use std::io::Write;
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use polyenergy::congruence::{self, CongruenceQuery};
use polyenergy::energy::{self, Budget, CountResult, EnergyInstance, GeneralInstance};
use polyenergy::ffield::{self, PhiEngine};
use polyenergy::fit::fit_exponent;
use polyenergy::geometry::{self, Family};
use polyenergy::polyarith::{parse_poly, parse_uni, IntPoly1, MPoly};
use polyenergy::sieve::{self, SieveContext, TableForm};
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::record::count_value;
use crate::CliError;

fn need<T: Clone>(v: &Option<T>, name: &str) -> Result<T, CliError> {
    v.clone().ok_or_else(|| CliError::Config(format!("missing `{name}`")))
}

fn uni(cfg: &ExperimentConfig) -> Result<IntPoly1, CliError> {
    Ok(parse_uni(&need(&cfg.poly, "poly")?, "x")?)
}

fn bivariate(text: &Option<String>, name: &str) -> Result<MPoly, CliError> {
    Ok(parse_poly(&need(text, name)?, &["x", "y"])?)
}

fn budget(cfg: &ExperimentConfig) -> Budget {
    let mut b = Budget::default();
    if let Some(x) = cfg.max_pairs {
        b.max_pairs = x as usize;
    }
    if let Some(x) = cfg.max_quadruples {
        b.max_quadruples = x as u128;
    }
    b.max_millis = cfg.max_millis;
    b
}

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

/// `poly` gives the difference instance of `p(x)`; otherwise `f, g, a, b`.
fn instance(cfg: &ExperimentConfig) -> Result<GeneralInstance, CliError> {
    let k = big(cfg.k.unwrap_or(0));
    let bound = cfg.bound.unwrap_or(1);
    if cfg.poly.is_some() {
        return Ok(GeneralInstance::from_energy(&uni(cfg)?, k, bound)?);
    }
    let f = bivariate(&cfg.f, "f")?;
    let g = bivariate(&cfg.g, "g")?;
    Ok(GeneralInstance::new(
        f,
        g,
        big(cfg.a.unwrap_or(1)),
        big(cfg.b.unwrap_or(1)),
        k,
        bound,
    )?)
}

fn count_payload(r: &CountResult) -> Value {
    json!({ "count": count_value(&r.count), "algo": r.algo })
}

fn count_once(cfg: &ExperimentConfig, bound: u64) -> Result<CountResult, CliError> {
    let algo = cfg.algo.as_deref().unwrap_or("mitm");
    let k = big(cfg.k.unwrap_or(0));
    let budget = budget(cfg);
    let r = match algo {
        "mitm" | "brute" => {
            let inst = EnergyInstance::new(uni(cfg)?, k, bound)?;
            if algo == "mitm" {
                energy::energy_mitm(&inst, &budget)?
            } else {
                energy::energy_bruteforce(&inst, &budget)?
            }
        }
        "general" | "general-brute" => {
            let cfg = ExperimentConfig { bound: Some(bound), ..cfg.clone() };
            let inst = instance(&cfg)?;
            if algo == "general" {
                energy::general_count(&inst, &budget)?
            } else {
                energy::general_count_bruteforce(&inst, &budget)?
            }
        }
        "curve" => energy::curve_count_in_box(&bivariate(&cfg.f, "f")?, &k, bound)?,
        other => {
            return Err(CliError::Config(format!(
                "unknown algo `{other}` (mitm, brute, general, general-brute, curve)"
            )))
        }
    };
    Ok(r)
}

fn count(cfg: &ExperimentConfig) -> Result<Value, CliError> {
    let r = count_once(cfg, need(&cfg.bound, "B")?)?;
    Ok(count_payload(&r))
}

fn scan(cfg: &ExperimentConfig) -> Result<Value, CliError> {
    let bs = need(&cfg.bounds, "B_list")?;
    let pairs: Vec<(u64, BigUint)> = match &cfg.counts {
        Some(cs) => bs.iter().copied().zip(cs.iter().map(|&c| BigUint::from(c))).collect(),
        None => bs
            .iter()
            .map(|&b| count_once(cfg, b).map(|r| (b, r.count)))
            .collect::<Result<_, _>>()?,
    };
    let fit = fit_exponent(&pairs)?;
    let points: Vec<Value> = pairs
        .iter()
        .map(|(b, c)| json!({ "B": b, "count": count_value(c) }))
        .collect();
    Ok(json!({ "points": points, "fit": fit }))
}

/// Writes `B,count,log10B,log10count`; zero counts leave the last column empty.
pub fn write_scan_csv(payload: &Value, path: &Path) -> Result<(), CliError> {
    let mut out = std::fs::File::create(path)?;
    writeln!(out, "B,count,log10B,log10count")?;
    for pt in payload["points"].as_array().into_iter().flatten() {
        let b = pt["B"].as_u64().unwrap_or(0);
        let c = match &pt["count"] {
            Value::String(s) => s.clone(),
            v => v.to_string(),
        };
        let logc = c
            .parse::<f64>()
            .ok()
            .filter(|&x| x > 0.0)
            .map(|x| x.log10().to_string())
            .unwrap_or_default();
        writeln!(out, "{b},{c},{},{logc}", (b as f64).log10())?;
    }
    Ok(())
}

fn expsum(cfg: &ExperimentConfig) -> Result<Value, CliError> {
    let inst = instance(cfg)?;
    let m = big(cfg.m.unwrap_or(0));
    let n = big(cfg.n.unwrap_or(0));
    match cfg.kind.as_deref().unwrap_or("sigma") {
        "sigma" => {
            let surface = ffield::build_sieve_surface(&inst, &big(need(&cfg.h, "h")?))?;
            let v = ffield::sigma_t(cfg.t.unwrap_or(1), need(&cfg.p, "p")?, &m, &n, &surface)?;
            Ok(json!({ "sigma": v }))
        }
        "phi" => {
            let h = need(&cfg.h, "h")?.unsigned_abs();
            let v = PhiEngine::new(&inst).phi(h, &m, &n)?;
            Ok(json!({ "phi": v }))
        }
        "psi" => {
            let surface = ffield::build_sieve_surface(&inst, &big(need(&cfg.h, "h")?))?;
            let (p, q) = (need(&cfg.p, "p")?, need(&cfg.q, "q")?);
            let direct = ffield::psi_sum_direct(&m, &n, p, q, &surface)?;
            let engine = PhiEngine::new(&inst);
            let mut factorized = Vec::new();
            let mut gap = 0.0f64;
            for i in 0..3u32 {
                let mut row = Vec::new();
                for j in 0..3u32 {
                    let v = ffield::psi_sum_factorized(i, j, &m, &n, p, q, &surface, &engine)?;
                    gap = gap.max(v.distance(&direct[i as usize][j as usize]));
                    row.push(v);
                }
                factorized.push(row);
            }
            Ok(json!({ "direct": direct, "factorized": factorized, "max_gap": gap }))
        }
        other => Err(CliError::Config(format!("unknown kind `{other}` (sigma, phi, psi)"))),
    }
}

fn congruence_cmd(cfg: &ExperimentConfig) -> Result<Value, CliError> {
    let q = CongruenceQuery::new(uni(cfg)?, need(&cfg.p, "p")?, need(&cfg.l, "l")?)?;
    let c = congruence::count_roots_mod_prime_power(&q);
    let ratio = congruence::padic_ratio(&q).ok();
    Ok(json!({ "count": count_value(&c), "padic_ratio": ratio }))
}

fn delta(cfg: &ExperimentConfig) -> Result<Value, CliError> {
    let f = bivariate(&cfg.f, "f")?;
    let k = big(cfg.k.unwrap_or(0));
    let (m, n) = (big(need(&cfg.m, "m")?), big(need(&cfg.n, "n")?));
    let cert = match cfg.p {
        Some(p) => congruence::delta_f_at_prime(&f, &k, &m, &n, p)?,
        None => congruence::delta_f(&f, &k, &m, &n)?,
    };
    let ratio = cert.bound_ratio();
    Ok(json!({ "certificate": cert, "bound_ratio": ratio }))
}

fn lines(cfg: &ExperimentConfig) -> Result<Value, CliError> {
    let f = bivariate(&cfg.f, "f")?;
    let k = big(cfg.k.unwrap_or(0));
    match cfg.p {
        Some(p) => {
            let (m, n) = (big(need(&cfg.m, "m")?), big(need(&cfg.n, "n")?));
            let taus = congruence::lines_mod_p(&f, &k, &m, &n, p)?;
            Ok(json!({ "p": p, "taus": taus }))
        }
        None => {
            let found: Vec<String> = geometry::rational_lines_in_level(&f, &k)?.iter().map(|c| c.to_string()).collect();
            Ok(json!({ "rational_lines": found }))
        }
    }
}

fn census(cfg: &ExperimentConfig) -> Result<Value, CliError> {
    let inst = instance(cfg)?;
    let family: Family = cfg.family.as_deref().unwrap_or("gamma").parse()?;
    let c = geometry::singular_census(&inst, family, cfg.bound.unwrap_or(100))?;
    Ok(serde_json::to_value(c).expect("census serializes"))
}

fn sieve_cmd(cfg: &ExperimentConfig) -> Result<Value, CliError> {
    let inst = instance(cfg)?;
    let d = inst.degree();
    let q_limit = cfg.q_limit.unwrap_or_else(|| sieve::balanced_sieve_limit(inst.bound, d));
    let ctx = SieveContext::new(&inst, &big(need(&cfg.h, "h")?), q_limit, cfg.alpha.unwrap_or(1))?;
    let form: TableForm = cfg.form.as_deref().unwrap_or("product").parse()?;
    let report = sieve::sieve_bound(&ctx, form)?;
    let mut v = serde_json::to_value(&report).expect("report serializes");
    let pairs = v.as_object_mut().and_then(|o| o.remove("pairs"));
    v["pair_count"] = json!(report.pairs.len());
    if let Some(path) = &cfg.table {
        let mut out = std::fs::File::create(path)?;
        writeln!(out, "p,q,s00,s01,s02,s10,s11,s12,s20,s21,s22,inner,main,remainder,main_coefficient,reference_coefficient")?;
        for r in &report.pairs {
            let s: Vec<String> = r.s.iter().flatten().map(|x| x.to_string()).collect();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.p,
                r.q,
                s.join(","),
                r.inner,
                r.main,
                r.remainder,
                r.main_coefficient,
                r.reference_coefficient
            )?;
        }
        v["table"] = json!(path);
    } else {
        v["pairs"] = pairs.unwrap_or(Value::Null);
    }
    Ok(v)
}

fn exponents(cfg: &ExperimentConfig) -> Result<Value, CliError> {
    let s = sieve::exponent_calculator(need(&cfg.d, "d")?)?;
    let used = if s.sieve_applies { s.sieve_exponent } else { s.determinant_exponent };
    let mut v = serde_json::to_value(&s).expect("summary serializes");
    v["summary"] = json!(format!(
        "{used:.6} {} {:.6}",
        if used < s.target { "<" } else { ">=" },
        s.target
    ));
    v["verified"] = json!(s.verified());
    Ok(v)
}

pub fn payload(cfg: &ExperimentConfig) -> Result<Value, CliError> {
    match cfg.command.as_str() {
        "count" => count(cfg),
        "scan" => scan(cfg),
        "expsum" => expsum(cfg),
        "congruence" => congruence_cmd(cfg),
        "delta" => delta(cfg),
        "lines" => lines(cfg),
        "census" => census(cfg),
        "sieve" => sieve_cmd(cfg),
        "exponents" => exponents(cfg),
        other => Err(CliError::Config(format!("unknown command `{other}`"))),
    }
}
