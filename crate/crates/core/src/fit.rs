//! Least-squares fits of growth exponents on log-log data.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};

/// Result of an ordinary least-squares fit of `log count` against `log B`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub slope: f64,
    /// Intercept in natural-log units.
    pub intercept: f64,
    /// Standard error of the slope; `None` with only two points.
    pub stderr: Option<f64>,
    /// B values whose count was zero and therefore left out.
    pub dropped: Vec<u64>,
    pub points_used: usize,
}

/// Fits `log(count) = slope * log(B) + intercept`, dropping zero counts.
pub fn fit_exponent(pairs: &[(u64, BigUint)]) -> Result<FitResult> {
    let mut dropped = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (b, c) in pairs {
        let c = c.to_f64().unwrap_or(f64::INFINITY);
        if c == 0.0 {
            dropped.push(*b);
            continue;
        }
        xs.push((*b as f64).ln());
        ys.push(c.ln());
    }
    if xs.len() < 2 {
        return Err(Error::domain("fewer than 2 nonzero counts"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("all B values coincide"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if xs.len() > 2 {
        let ssr: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| {
                let r = y - (slope * x + intercept);
                r * r
            })
            .sum();
        Some((ssr / (n - 2.0) / sxx).sqrt())
    } else {
        None
    };
    Ok(FitResult {
        slope,
        intercept,
        stderr,
        dropped,
        points_used: xs.len(),
    })
}
