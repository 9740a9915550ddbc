//! Small statistics helpers: least squares, order statistics, Monte Carlo
//! summaries.

use serde::Serialize;

/// Ordinary least-squares line `y = intercept + slope * x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Least-squares fit; `None` with fewer than two distinct abscissae.
pub fn ols(x: &[f64], y: &[f64]) -> Option<LineFit> {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    if x.len() < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some(LineFit {
        slope,
        intercept: my - slope * mx,
    })
}

/// Slope of `log y` against `log x`, skipping non-positive entries.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter(|(&a, &b)| a > 0.0 && b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .unzip();
    ols(&lx, &ly).map(|f| f.slope)
}

/// Linear-interpolated quantile of finite samples, `p` in `[0, 1]`.
pub fn quantile(samples: &[f64], p: f64) -> Option<f64> {
    let mut v: Vec<f64> = samples.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let pos = p.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(v[lo] + (v[hi] - v[lo]) * (pos - lo as f64))
}

pub fn median(samples: &[f64]) -> Option<f64> {
    quantile(samples, 0.5)
}

/// Sample mean, unbiased variance and standard error of the mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    pub n: usize,
}

pub fn mean_estimate(samples: &[f64]) -> MeanEstimate {
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let variance = if n > 1 {
        samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    MeanEstimate {
        mean,
        variance,
        std_error: (variance / n as f64).sqrt(),
        n,
    }
}

/// Median with lower and upper quartiles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Quartiles {
    pub lower: f64,
    pub median: f64,
    pub upper: f64,
}

pub fn quartiles(samples: &[f64]) -> Option<Quartiles> {
    Some(Quartiles {
        lower: quantile(samples, 0.25)?,
        median: quantile(samples, 0.5)?,
        upper: quantile(samples, 0.75)?,
    })
}

/// Least-squares slope of `log2 P_k` against `k` where `P_k` is a profile
/// value at `eps = 2^-k`. Positive means growth as `eps` shrinks.
pub fn profile_trend(octaves: &[f64], values: &[f64]) -> Option<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) = octaves
        .iter()
        .zip(values)
        .filter(|(_, &v)| v > 0.0)
        .map(|(&k, &v)| (k, v.log2()))
        .unzip();
    ols(&x, &y).map(|f| f.slope)
}

/// Largest per-octave growth of a scale profile still read as bounded.
/// Extreme-value growth of a running maximum alone can reach a few
/// hundredths per octave.
pub const TREND_TOLERANCE: f64 = 0.05;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ols_recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 - 0.75 * v).collect();
        let f = ols(&x, &y).unwrap();
        assert_relative_eq!(f.slope, -0.75, epsilon = 1e-14);
        assert_relative_eq!(f.intercept, 2.5, epsilon = 1e-14);
        assert!(ols(&[1.0, 1.0], &[0.0, 1.0]).is_none());
    }

    #[test]
    fn loglog_of_power_law() {
        let x: Vec<f64> = (1..10).map(|k| k as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(-0.4)).collect();
        assert_relative_eq!(loglog_slope(&x, &y).unwrap(), -0.4, epsilon = 1e-12);
    }

    #[test]
    fn quantiles() {
        let v = [4.0, 1.0, 3.0, 2.0, 5.0];
        assert_eq!(median(&v), Some(3.0));
        let q = quartiles(&v).unwrap();
        assert_eq!((q.lower, q.upper), (2.0, 4.0));
        assert_eq!(median(&[1.0, 2.0]), Some(1.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn mean_and_error() {
        let e = mean_estimate(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.mean, 2.5);
        assert_relative_eq!(e.variance, 5.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(e.std_error, (5.0 / 12.0f64).sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn profile_trend_sign() {
        let k = [1.0, 2.0, 3.0, 4.0];
        let up = [1.0, 2.0, 4.0, 8.0];
        assert_relative_eq!(profile_trend(&k, &up).unwrap(), 1.0, epsilon = 1e-12);
        let flat = [1.0, 1.0, 1.0, 1.0];
        assert_eq!(profile_trend(&k, &flat).unwrap(), 0.0);
    }
}
