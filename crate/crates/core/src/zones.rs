//! Frequency-zone partition of unity, the dissipative-structure rate
//! eta(r), the bounded-zone spectral-gap certificate, and the sampled
//! pointwise-estimate constants (C, c).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{pow_conv, ModelParams};
use crate::propagator::block_propagator;
use crate::symbol::exact_eigenvalues;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ZoneConfig {
    /// Interior-zone radius.
    pub eps: f64,
    /// Exterior-zone radius.
    pub big_n: f64,
    /// Relative width of the chi_int transition band [eps(1-w_int), eps].
    pub w_int: f64,
    /// Relative width of the chi_ext transition band [N, N(1+w_ext)].
    pub w_ext: f64,
}

impl Default for ZoneConfig {
    fn default() -> Self {
        Self { eps: 0.1, big_n: 10.0, w_int: 0.5, w_ext: 0.5 }
    }
}

impl ZoneConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.eps > 0.0
            && self.big_n > self.eps
            && self.w_int > 0.0
            && self.w_int < 1.0
            && self.w_ext > 0.0
            && self.w_ext <= 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidZone(format!(
                "need 0 < eps(1-w_int) < eps < N and widths in [0,1] (eps={}, N={}, w_int={}, w_ext={})",
                self.eps, self.big_n, self.w_int, self.w_ext
            )))
        }
    }
}

/// Quintic smoothstep: 0 below, 1 above, C^2 monotone in between.
fn smoothstep(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        x * x * x * (6.0 * x * x - 15.0 * x + 10.0)
    }
}

/// (chi_int, chi_bdd, chi_ext) at radius r; exact plateaus outside the
/// transition bands and chi_bdd = 1 - chi_int - chi_ext everywhere.
pub fn zone_weights(z: &ZoneConfig, r: f64) -> (f64, f64, f64) {
    debug_assert!(r >= 0.0);
    let lo = z.eps * (1.0 - z.w_int);
    let chi_int = 1.0 - smoothstep((r - lo) / (z.eps - lo));
    let chi_ext = smoothstep((r - z.big_n) / (z.big_n * z.w_ext));
    (chi_int, 1.0 - chi_int - chi_ext, chi_ext)
}

/// Dissipative-structure rate eta(r) = r^{2-2 rho} / (1 + r^{2 theta - 2 rho}).
pub fn eta(p: &ModelParams, r: f64) -> f64 {
    debug_assert!(r >= 0.0);
    pow_conv(r, 2.0 - 2.0 * p.rho) / (1.0 + pow_conv(r, 2.0 * p.theta - 2.0 * p.rho))
}

/// Certified lower bound data for the bounded zone.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GapCertificate {
    pub min_real_part: f64,
    pub argmin_r: f64,
    pub samples: usize,
    pub identity_margin: f64,
}

/// The strictly positive combination 2(a^2+b^2) sigma^2 + (b^2-a^2)^2 r^2
/// that a pure-imaginary eigenvalue would force to vanish.
pub fn imaginary_root_certificate(p: &ModelParams, r: f64) -> f64 {
    debug_assert!(r > 0.0);
    let sigma = p.sigma(r);
    let s2 = p.a * p.a + p.b * p.b;
    let d = p.b * p.b - p.a * p.a;
    2.0 * s2 * sigma * sigma + d * d * r * r
}

/// Scans min_j Re lambda_j and the imaginary-root margin over log-spaced
/// samples of [eps, N]. Fails if the gap closes anywhere.
pub fn spectral_gap_scan(p: &ModelParams, z: &ZoneConfig, samples: usize) -> Result<GapCertificate> {
    z.validate()?;
    if samples < 2 {
        return Err(Error::InvalidZone("gap scan needs at least 2 samples".into()));
    }
    let log_lo = z.eps.ln();
    let step = (z.big_n.ln() - log_lo) / (samples - 1) as f64;
    let (min_real_part, argmin_r, identity_margin) = (0..samples)
        .into_par_iter()
        .map(|i| {
            let r = (log_lo + i as f64 * step).exp();
            let eig = exact_eigenvalues(p, r);
            let min_re = eig.lambda.iter().map(|l| l.re).fold(f64::INFINITY, f64::min);
            (min_re, r, imaginary_root_certificate(p, r))
        })
        .reduce(
            || (f64::INFINITY, 0.0, f64::INFINITY),
            |x, y| {
                let (re, r) = if x.0 <= y.0 { (x.0, x.1) } else { (y.0, y.1) };
                (re, r, x.2.min(y.2))
            },
        );
    if min_real_part <= 0.0 {
        return Err(Error::GapViolation { min_real_part, argmin_r });
    }
    Ok(GapCertificate { min_real_part, argmin_r, samples, identity_margin })
}

/// log of the smallest C making ||e^{-B(r)t}|| <= C e^{-c eta(r) t} hold on
/// the sample grid, for a fixed c. Computed in the log domain so that huge
/// e^{c eta t} factors never meet underflowed norms as inf * 0.
fn log_envelope_constant(p: &ModelParams, c_rate: f64, pairs: &[(f64, f64, f64)]) -> f64 {
    pairs
        .par_iter()
        .map(|&(r, t, log_norm)| log_norm + c_rate * eta(p, r) * t)
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

/// Largest c > 0 (with its minimal C <= c_cap) such that
/// ||e^{-B(r)t}|| <= C e^{-c eta(r) t} at every sample pair. The envelope
/// constant is monotone increasing in c, so the feasibility boundary is
/// found by doubling plus bisection.
pub fn pointwise_constants_fit(
    p: &ModelParams,
    r_samples: &[f64],
    t_samples: &[f64],
) -> Result<(f64, f64)> {
    const C_CAP: f64 = 100.0;
    if r_samples.is_empty() || t_samples.is_empty() {
        return Err(Error::InvalidParams("pointwise fit needs nonempty samples".into()));
    }
    let pairs: Vec<(f64, f64, f64)> = r_samples
        .iter()
        .flat_map(|&r| t_samples.iter().map(move |&t| (r, t)))
        .map(|(r, t)| {
            let norm = block_propagator(p, r, t).opnorm();
            (r, t, if norm > 0.0 { norm.ln() } else { f64::NEG_INFINITY })
        })
        .collect();
    let log_cap = C_CAP.ln();
    let feasible = |c_rate: f64| log_envelope_constant(p, c_rate, &pairs) <= log_cap;
    if !feasible(1e-12) {
        return Err(Error::PointwiseInfeasible { c_cap: C_CAP });
    }
    let mut lo = 1e-12;
    let mut hi = 1.0;
    while feasible(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            break;
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c_big = log_envelope_constant(p, lo, &pairs).exp().max(1.0);
    Ok((c_big, lo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p_equal() -> ModelParams {
        ModelParams::new(1.0, 2.0, 0.25, 0.75).unwrap()
    }

    #[test]
    fn plateaus_and_midpoints() {
        let z = ZoneConfig::default();
        let (i, b, e) = zone_weights(&z, z.eps * 0.4);
        assert_eq!((i, b, e), (1.0, 0.0, 0.0));
        let (i, b, e) = zone_weights(&z, 1.0);
        assert_eq!((i, b, e), (0.0, 1.0, 0.0));
        let (i, b, e) = zone_weights(&z, 100.0);
        assert_eq!((i, b, e), (0.0, 0.0, 1.0));
        // midpoint of the chi_int transition band [0.05, 0.1]
        let (i, _, _) = zone_weights(&z, 0.075);
        assert_relative_eq!(i, 0.5, max_relative = 1e-14);
    }

    #[test]
    fn eta_values_and_limits() {
        let p = p_equal();
        assert_relative_eq!(eta(&p, 1.0), 0.5);
        assert_relative_eq!(eta(&p, 4.0), 1.6, max_relative = 1e-14);
        // log-log slopes at the extremes
        let slope_small = (eta(&p, 1e-6).ln() - eta(&p, 1e-6 * 1.01).ln())
            / ((1e-6f64).ln() - (1e-6f64 * 1.01).ln());
        assert!((slope_small - 1.5).abs() < 0.05);
        let slope_large = (eta(&p, 1e6).ln() - eta(&p, 1e6 * 1.01).ln())
            / ((1e6f64).ln() - (1e6f64 * 1.01).ln());
        assert!((slope_large - 0.5).abs() < 0.05);
    }

    #[test]
    fn gap_scan_matches_dense_reference() {
        let p = p_equal();
        let cert = spectral_gap_scan(&p, &ZoneConfig::default(), 100_000).unwrap();
        // minimum sits at the left endpoint r = 0.1 (a-block minus root)
        assert_relative_eq!(cert.argmin_r, 0.1, max_relative = 1e-9);
        assert!((cert.min_real_part - 0.0316).abs() < 1e-3);
        assert!(cert.identity_margin > 0.0);
        let pf = ModelParams::new(1.0, 2.0, 0.0, 1.0).unwrap();
        assert!(spectral_gap_scan(&pf, &ZoneConfig::default(), 1000).unwrap().min_real_part > 0.0);
    }

    #[test]
    fn certificate_example() {
        let p = p_equal();
        assert_relative_eq!(imaginary_root_certificate(&p, 1.0), 49.0, max_relative = 1e-14);
    }

    #[test]
    fn pointwise_fit_finds_rate_near_one() {
        let p = p_equal();
        let r: Vec<f64> = (0..31)
            .map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 30.0))
            .collect();
        let t = [0.0, 1.0, 10.0, 100.0];
        let (c_big, c_rate) = pointwise_constants_fit(&p, &r, &t).unwrap();
        assert!(c_big >= 1.0 && c_big <= 100.0);
        assert!(c_rate > 0.5 && c_rate < 2.0, "c = {c_rate}");
        // necessary condition at the slowest sampled mode
        for &ri in &r {
            let min_re = exact_eigenvalues(&p, ri)
                .lambda
                .iter()
                .map(|l| l.re)
                .fold(f64::INFINITY, f64::min);
            // the envelope cannot beat the slowest mode asymptotically;
            // at finite t the constant C absorbs slack, so only sanity-check
            assert!(min_re > 0.0);
        }
    }

    #[test]
    fn invalid_zone_rejected() {
        let z = ZoneConfig { eps: 1.0, big_n: 0.5, ..ZoneConfig::default() };
        assert!(z.validate().is_err());
    }

    proptest! {
        #[test]
        fn partition_of_unity(r in 0.0f64..1e3) {
            let z = ZoneConfig::default();
            let (i, b, e) = zone_weights(&z, r);
            prop_assert!((i + b + e - 1.0).abs() < 1e-12);
            for w in [i, b, e] {
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&w));
            }
        }

        #[test]
        fn weights_monotone_on_bands(x in 0.0f64..1.0) {
            let z = ZoneConfig::default();
            let lo = z.eps * (1.0 - z.w_int);
            let r1 = lo + x * (z.eps - lo) * 0.99;
            let r2 = r1 + (z.eps - lo) * 0.01;
            prop_assert!(zone_weights(&z, r1).0 >= zone_weights(&z, r2).0);
            let s1 = z.big_n * (1.0 + x * z.w_ext * 0.99);
            let s2 = s1 + z.big_n * z.w_ext * 0.01;
            prop_assert!(zone_weights(&z, s1).2 <= zone_weights(&z, s2).2);
        }
    }
}
