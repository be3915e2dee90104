//! Least-squares extraction of algebraic decay exponents from norm series.

use serde::Serialize;

use crate::error::{Error, Result};

/// Ordinary least squares of log(norm) against log(1 + t) over a window.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub stderr: f64,
    pub window: (f64, f64),
    pub n_points: usize,
}

/// Plain OLS slope with its standard error; x values must not be constant.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len();
    if n < 2 {
        return Err(Error::InvalidFit("need at least 2 points".into()));
    }
    let xm = xs.iter().sum::<f64>() / n as f64;
    let ym = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    if sxx <= 0.0 {
        return Err(Error::InvalidFit("abscissae are constant".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let stderr = if n > 2 { (ssr / (n - 2) as f64 / sxx).sqrt() } else { 0.0 };
    Ok((slope, stderr))
}

/// Fits the decay exponent of a (t, norm) series restricted to the window.
pub fn fit_decay(series: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit> {
    if !(window.0 > 0.0 && window.1 > window.0) {
        return Err(Error::InvalidFit(format!(
            "window endpoints must be positive and increasing (got {:?})",
            window
        )));
    }
    let inside: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|&(t, _)| t >= window.0 && t <= window.1)
        .collect();
    if inside.len() < 5 {
        return Err(Error::InvalidFit(format!(
            "need at least 5 points inside the window, found {}",
            inside.len()
        )));
    }
    if inside.iter().any(|&(_, v)| !(v > 0.0)) {
        return Err(Error::InvalidFit("norms must be positive for a log fit".into()));
    }
    let xs: Vec<f64> = inside.iter().map(|&(t, _)| (1.0 + t).ln()).collect();
    let ys: Vec<f64> = inside.iter().map(|&(_, v)| v.ln()).collect();
    let (slope, stderr) = ols_slope(&xs, &ys)?;
    Ok(DecayFit { slope, stderr, window, n_points: inside.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn times() -> Vec<f64> {
        (0..30).map(|i| 10f64.powf(1.0 + 3.0 * i as f64 / 29.0)).collect()
    }

    #[test]
    fn recovers_exact_power_law() {
        let series: Vec<(f64, f64)> = times().iter().map(|&t| (t, (1.0 + t).powf(-0.5))).collect();
        let fit = fit_decay(&series, (1e1, 1e4)).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-10);
        assert!(fit.stderr < 1e-10);
    }

    #[test]
    fn constant_series_has_zero_slope() {
        let series: Vec<(f64, f64)> = times().iter().map(|&t| (t, 3.0)).collect();
        let fit = fit_decay(&series, (1e1, 1e4)).unwrap();
        assert!(fit.slope.abs() < 1e-12);
    }

    #[test]
    fn exponential_decay_steepens() {
        let series: Vec<(f64, f64)> = times().iter().map(|&t| (t, (-0.01 * t).exp())).collect();
        let early = fit_decay(&series, (10.0, 100.0)).unwrap();
        let late = fit_decay(&series, (100.0, 1e4)).unwrap();
        assert!(late.slope < early.slope);
    }

    #[test]
    fn window_and_positivity_guards() {
        let series: Vec<(f64, f64)> = times().iter().map(|&t| (t, 1.0)).collect();
        assert!(fit_decay(&series, (1e4, 1e1)).is_err());
        assert!(fit_decay(&series, (9e3, 1e4)).is_err()); // too few points
        let mut bad = series.clone();
        bad[10].1 = 0.0;
        assert!(fit_decay(&bad, (1e1, 1e4)).is_err());
    }
}
