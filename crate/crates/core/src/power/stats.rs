use serde::Serialize;
use statrs::distribution::{Binomial, DiscreteCDF};

use super::PowerError;

const TOLERANCE: f64 = 1e-10;

/// Bisection for the root of a monotone function on `[0, 1]`.
fn bisect(mut lo: f64, mut hi: f64, increasing: bool, f: impl Fn(f64) -> f64) -> f64 {
    // Iterate well past the stated tolerance; each step is cheap.
    while hi - lo > TOLERANCE * 1e-2 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn upper_tail(p: f64, s: u64, n: u64) -> f64 {
    // P(X ≥ s)
    if s == 0 {
        1.0
    } else {
        Binomial::new(p, n).expect("p in [0, 1]").sf(s - 1)
    }
}

fn lower_tail(p: f64, s: u64, n: u64) -> f64 {
    Binomial::new(p, n).expect("p in [0, 1]").cdf(s)
}

/// Exact two-sided `1 - alpha` interval for a binomial proportion.
pub fn clopper_pearson(successes: usize, n: usize, alpha: f64) -> Result<(f64, f64), PowerError> {
    if n == 0 || successes > n || !(alpha > 0.0 && alpha < 1.0) {
        return Err(PowerError::Domain(format!(
            "clopper_pearson({successes}, {n}, {alpha}) needs 0 ≤ s ≤ n, n ≥ 1, 0 < alpha < 1"
        )));
    }
    let (s, n64) = (successes as u64, n as u64);
    let half = alpha / 2.0;
    let lower = if s == 0 {
        0.0
    } else if s == n64 {
        half.powf(1.0 / n as f64)
    } else {
        bisect(0.0, 1.0, true, |p| upper_tail(p, s, n64) - half)
    };
    let upper = if s == n64 {
        1.0
    } else if s == 0 {
        1.0 - half.powf(1.0 / n as f64)
    } else {
        bisect(0.0, 1.0, false, |p| lower_tail(p, s, n64) - half)
    };
    Ok((lower, upper))
}

/// Mean, sample standard deviation and quartiles (linear interpolation
/// between order statistics).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

pub fn describe(values: &[f64]) -> Option<Summary> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    let mean = v.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let q = |p: f64| {
        let h = (n - 1) as f64 * p;
        let (i, frac) = (h.floor() as usize, h - h.floor());
        if i + 1 < n {
            v[i] + frac * (v[i + 1] - v[i])
        } else {
            v[i]
        }
    };
    Some(Summary { n, mean, sd, min: v[0], q1: q(0.25), median: q(0.5), q3: q(0.75), max: v[n - 1] })
}
