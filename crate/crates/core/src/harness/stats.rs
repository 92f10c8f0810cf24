//! Binomial confidence intervals.

use statrs::distribution::{Beta, Binomial, ContinuousCDF, DiscreteCDF, Normal};

use crate::error::{Error, Result};

fn check(successes: u64, n: u64, confidence: f64) -> Result<()> {
    if n == 0 || successes > n || !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::Configuration(format!(
            "need 0 <= successes <= n, n > 0 and confidence in (0,1); got {successes}/{n} at {confidence}"
        )));
    }
    Ok(())
}

fn z(confidence: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    normal.inverse_cdf(1.0 - (1.0 - confidence) / 2.0)
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, n: u64, confidence: f64) -> Result<(f64, f64)> {
    check(successes, n, confidence)?;
    let z = z(confidence);
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * ((p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt()) / denom;
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == n { 1.0 } else { (centre + half).min(1.0) };
    Ok((lo, hi))
}

/// Clopper–Pearson (exact) interval.
pub fn clopper_pearson(successes: u64, n: u64, confidence: f64) -> Result<(f64, f64)> {
    check(successes, n, confidence)?;
    let alpha = 1.0 - confidence;
    let (k, nf) = (successes as f64, n as f64);
    let lo = if successes == 0 {
        0.0
    } else {
        Beta::new(k, nf - k + 1.0).map_err(|e| Error::Configuration(e.to_string()))?.inverse_cdf(alpha / 2.0)
    };
    let hi = if successes == n {
        1.0
    } else {
        Beta::new(k + 1.0, nf - k).map_err(|e| Error::Configuration(e.to_string()))?.inverse_cdf(1.0 - alpha / 2.0)
    };
    Ok((lo, hi))
}

/// Central region `[lo, hi]` of success counts holding at least `confidence`
/// of the Binomial(n, p) mass.
pub fn binomial_region(n: u64, p: f64, confidence: f64) -> Result<(u64, u64)> {
    if !(0.0..=1.0).contains(&p) || n == 0 {
        return Err(Error::Configuration(format!("bad binomial n={n}, p={p}")));
    }
    if p == 0.0 {
        return Ok((0, 0));
    }
    if p == 1.0 {
        return Ok((n, n));
    }
    let b = Binomial::new(p, n).map_err(|e| Error::Configuration(e.to_string()))?;
    let tail = (1.0 - confidence) / 2.0;
    // Smallest lo with P[X < lo] ≤ tail and smallest hi with P[X ≤ hi] ≥ 1 − tail.
    let mut lo = b.inverse_cdf(tail);
    if lo > 0 && b.cdf(lo - 1) > tail {
        lo -= 1;
    }
    while lo > 0 && b.cdf(lo - 1) > tail {
        lo -= 1;
    }
    let mut hi = b.inverse_cdf(1.0 - tail);
    while hi < n && b.cdf(hi) < 1.0 - tail {
        hi += 1;
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_boundaries_and_width() {
        assert_eq!(wilson_interval(0, 100, 0.99).unwrap().0, 0.0);
        assert_eq!(wilson_interval(100, 100, 0.99).unwrap().1, 1.0);
        let (lo, hi) = wilson_interval(50, 100, 0.95).unwrap();
        assert!(lo < 0.5 && hi > 0.5);
        // Closed form: 2·1.96·sqrt(0.25/100 + 1.96²/40000)/(1 + 1.96²/100).
        let zz: f64 = 1.959964;
        let w = 2.0 * zz * (0.0025 + zz * zz / 40000.0).sqrt() / (1.0 + zz * zz / 100.0);
        assert!(((hi - lo) - w).abs() < 1e-6, "{}", hi - lo);
        assert!(((hi - lo) - 0.19).abs() < 0.005);
        assert!(wilson_interval(5, 4, 0.9).is_err());
    }

    #[test]
    fn clopper_pearson_contains_wilson_centre() {
        let (lo, hi) = clopper_pearson(30, 100, 0.99).unwrap();
        assert!(lo < 0.3 && hi > 0.3);
        let (wl, wh) = wilson_interval(30, 100, 0.99).unwrap();
        assert!(lo <= wl + 0.02 && hi >= wh - 0.02);
        assert_eq!(clopper_pearson(0, 10, 0.95).unwrap().0, 0.0);
    }

    #[test]
    fn region_has_mass() {
        let (lo, hi) = binomial_region(10_000, 0.75, 0.99).unwrap();
        let b = Binomial::new(0.75, 10_000).unwrap();
        let mass = b.cdf(hi) - if lo == 0 { 0.0 } else { b.cdf(lo - 1) };
        assert!(mass >= 0.99, "{mass}");
        assert!(lo < 7500 && hi > 7500);
        assert_eq!(binomial_region(5, 1.0, 0.99).unwrap(), (5, 5));
    }
}
