//! Small statistics helpers for campaign aggregates.

use super::report::{HistogramBin, Interval};

/// 97.5% standard normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes / n` at 95%.
pub fn wilson_interval(successes: usize, n: usize) -> Option<Interval> {
    if n == 0 {
        return None;
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    Some(Interval { low: (center - half).max(0.0), high: (center + half).min(1.0) })
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Linear-interpolation percentile (`p` in `[0, 100]`) of unsorted data.
pub fn percentile(xs: &[f64], p: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = p / 100.0 * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, my) = (mean(xs), mean(ys));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

/// Fixed-width bins on `[left, right)`; values outside go to the end bins.
pub fn histogram(xs: &[f64], left: f64, right: f64, width: f64) -> Vec<HistogramBin> {
    let nbins = ((right - left) / width).round() as usize;
    let mut bins: Vec<HistogramBin> = (0..nbins)
        .map(|i| HistogramBin { left: left + i as f64 * width, right: left + (i + 1) as f64 * width, count: 0 })
        .collect();
    for &x in xs {
        let i = ((x - left) / width).floor().clamp(0.0, (nbins - 1) as f64) as usize;
        bins[i].count += 1;
    }
    bins
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // 0 of 10: [0, z^2 / (n + z^2)]
        let ci = wilson_interval(0, 10).unwrap();
        assert_eq!(ci.low, 0.0);
        assert!((ci.high - Z95 * Z95 / (10.0 + Z95 * Z95)).abs() < 1e-12);
        let one = wilson_interval(1, 1).unwrap();
        assert!(one.low > 0.0 && one.high == 1.0);
        let mid = wilson_interval(50, 100).unwrap();
        assert!((mid.low + mid.high - 1.0).abs() < 1e-12);
        assert!(mid.low < 0.5 && mid.high > 0.5);
        assert!(wilson_interval(0, 0).is_none());
    }

    #[test]
    fn percentiles_and_histogram() {
        let xs = [3.0, 1.0, 2.0, 4.0, 5.0];
        assert_eq!(percentile(&xs, 50.0), 3.0);
        assert_eq!(percentile(&xs, 100.0), 5.0);
        assert_eq!(percentile(&xs, 25.0), 2.0);
        assert!((percentile(&xs, 99.0) - 4.96).abs() < 1e-12);
        let h = histogram(&[-10.0, 0.1, 0.2, 0.6, 99.0], 0.0, 1.0, 0.5);
        assert_eq!(h.iter().map(|b| b.count).collect::<Vec<_>>(), vec![3, 2]);
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.5]) - 0.998).abs() < 1e-2);
        assert!((variance(&[1.0, 2.0, 3.0]) - 1.0).abs() < 1e-15);
    }
}
