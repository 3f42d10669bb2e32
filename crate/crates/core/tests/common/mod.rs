#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use polyenergy::polyarith::IntPoly1;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Roots of `q` among `0..m`, stepping through the residues with a forward-difference table.
pub fn naive_root_count(q: &IntPoly1, m: u64) -> u64 {
    let mb = BigInt::from(m);
    let d = q.degree().unwrap_or(0);
    let mut table: Vec<u64> = (0..=d as i64)
        .map(|x| q.eval(&BigInt::from(x)).mod_floor(&mb).to_u64().unwrap())
        .collect();
    for level in 1..=d {
        for i in (level..=d).rev() {
            table[i] = (table[i] + m - table[i - 1]) % m;
        }
    }
    // table[i] now holds the i-th forward difference at x = 0
    let mut count = 0;
    for _ in 0..m {
        if table[0] == 0 {
            count += 1;
        }
        for i in 0..d {
            let s = table[i] + table[i + 1];
            table[i] = if s >= m { s - m } else { s };
        }
    }
    count
}

/// A mix of dense random polynomials and products with repeated roots and `p`-power
/// content, degrees 1 to 6.
pub fn random_congruence_polys(rng: &mut ChaCha8Rng, n: usize) -> Vec<IntPoly1> {
    (0..n)
        .map(|i| loop {
            let q = if i % 2 == 0 {
                let d = rng.gen_range(1..=6);
                let c: Vec<i64> = (0..=d).map(|_| rng.gen_range(-60..=60)).collect();
                IntPoly1::from_i64(&c, "x")
            } else {
                let mut q = IntPoly1::from_i64(&[[1, 2, 3, 4, 6, 8, 9, 12][rng.gen_range(0..8)]], "x");
                let factors = rng.gen_range(1..=3);
                for _ in 0..factors {
                    let r = rng.gen_range(-12..=12);
                    let e = rng.gen_range(1..=3);
                    let lin = IntPoly1::from_i64(&[-r, rng.gen_range(1..=3)], "x");
                    q = &q * &lin.pow(e);
                }
                q
            };
            if q.degree().is_some_and(|d| (1..=6).contains(&d)) {
                break q;
            }
        })
        .collect()
}

const BATCH_DEGREE: usize = 6;

/// [`naive_root_count`] for many polynomials of degree at most 6 at once, one lane each.
pub fn naive_root_counts(polys: &[IntPoly1], m: u64) -> Vec<u64> {
    assert!(m < 1 << 31);
    let n = polys.len();
    let mb = BigInt::from(m);
    let mut rows = vec![0u32; (BATCH_DEGREE + 1) * n];
    for (j, q) in polys.iter().enumerate() {
        assert!(q.degree().unwrap_or(0) <= BATCH_DEGREE);
        let mut t: Vec<u64> = (0..=BATCH_DEGREE as i64)
            .map(|x| q.eval(&BigInt::from(x)).mod_floor(&mb).to_u64().unwrap())
            .collect();
        for level in 1..=BATCH_DEGREE {
            for i in (level..=BATCH_DEGREE).rev() {
                t[i] = (t[i] + m - t[i - 1]) % m;
            }
        }
        for (i, v) in t.into_iter().enumerate() {
            rows[i * n + j] = v as u32;
        }
    }
    let mut counts = vec![0u32; n];
    #[cfg(target_arch = "x86_64")]
    {
        if is_x86_feature_detected!("avx2") {
            unsafe { sweep_avx2(&mut rows, &mut counts, n, m as u32) };
            return counts.into_iter().map(u64::from).collect();
        }
    }
    sweep(&mut rows, &mut counts, n, m as u32);
    counts.into_iter().map(u64::from).collect()
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn sweep_avx2(rows: &mut [u32], counts: &mut [u32], n: usize, m: u32) {
    use std::arch::x86_64::*;
    let full = n / 8 * 8;
    let modulus = _mm256_set1_epi32(m as i32);
    let zero = _mm256_setzero_si256();
    for start in (0..full).step_by(8) {
        let mut t = [zero; BATCH_DEGREE + 1];
        for (i, v) in t.iter_mut().enumerate() {
            *v = _mm256_loadu_si256(rows[i * n + start..].as_ptr() as *const __m256i);
        }
        let mut c = zero;
        for _ in 0..m {
            // the mask is all ones (-1) in lanes holding a root
            c = _mm256_sub_epi32(c, _mm256_cmpeq_epi32(t[0], zero));
            for i in 0..BATCH_DEGREE {
                let s = _mm256_add_epi32(t[i], t[i + 1]);
                t[i] = _mm256_min_epu32(s, _mm256_sub_epi32(s, modulus));
            }
        }
        _mm256_storeu_si256(counts[start..].as_mut_ptr() as *mut __m256i, c);
    }
    if full < n {
        let mut tail: Vec<u32> = (0..=BATCH_DEGREE)
            .flat_map(|i| rows[i * n + full..(i + 1) * n].to_vec())
            .collect();
        sweep(&mut tail, &mut counts[full..], n - full, m);
    }
}

fn sweep(rows: &mut [u32], counts: &mut [u32], n: usize, m: u32) {
    for _ in 0..m {
        for (c, &v) in counts.iter_mut().zip(&rows[..n]) {
            *c += u32::from(v == 0);
        }
        for i in 0..BATCH_DEGREE {
            let (lo, hi) = rows[i * n..(i + 2) * n].split_at_mut(n);
            for (a, &b) in lo.iter_mut().zip(hi.iter()) {
                let s = *a + b;
                *a = s.min(s.wrapping_sub(m));
            }
        }
    }
}
