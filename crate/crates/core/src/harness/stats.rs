use statrs::distribution::{Beta, ContinuousCDF};

/// Exact (Clopper–Pearson) two-sided interval for `successes / trials`.
pub fn clopper_pearson(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let alpha = 1.0 - confidence;
    let (k, n) = (successes as f64, trials as f64);
    let lower = if successes == 0 {
        0.0
    } else {
        Beta::new(k, n - k + 1.0).expect("positive shape").inverse_cdf(alpha / 2.0)
    };
    let upper = if successes == trials {
        1.0
    } else {
        Beta::new(k + 1.0, n - k).expect("positive shape").inverse_cdf(1.0 - alpha / 2.0)
    };
    (lower, upper)
}

/// `p − 3·sqrt(p(1 − p)/trials)`.
pub fn three_sigma_floor(p: f64, trials: u64) -> f64 {
    p - 3.0 * (p * (1.0 - p) / trials as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_intervals_have_closed_forms() {
        // k = 0: upper = 1 − (α/2)^(1/n); k = n: lower = (α/2)^(1/n).
        let (lo, hi) = clopper_pearson(0, 10, 0.95);
        assert_eq!(lo, 0.0);
        assert!((hi - (1.0 - 0.025f64.powf(0.1))).abs() < 1e-9);
        let (lo, hi) = clopper_pearson(10, 10, 0.95);
        assert!((lo - 0.025f64.powf(0.1)).abs() < 1e-9);
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn interior_interval_brackets_the_estimate() {
        let (lo, hi) = clopper_pearson(1750, 2000, 0.999);
        assert!(lo < 0.875 && 0.875 < hi);
        assert!(hi - lo < 0.05);
    }

    #[test]
    fn floor_value() {
        assert!((three_sigma_floor(0.875, 2000) - 0.852_814_700_8).abs() < 1e-9);
    }
}
