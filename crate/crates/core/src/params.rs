//! Model parameters of the doubly dissipative elastic wave system and the
//! classification of the diffusion-structure regime.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for deciding the borderline case rho + theta = 1.
pub const REGIME_TOL: f64 = 1e-12;

/// Position of rho + theta relative to the diffusion-structure threshold 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// rho + theta < 1: triple diffusion phenomena.
    Below,
    /// rho + theta = 1 (within `REGIME_TOL`): the two parabolic scales merge.
    Equal,
    /// rho + theta > 1: double diffusion phenomena.
    Above,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Below => write!(f, "below"),
            Regime::Equal => write!(f, "equal"),
            Regime::Above => write!(f, "above"),
        }
    }
}

/// Validated parameters (a, b, rho, theta) with the regime recorded.
///
/// The wave speeds satisfy b > a > 0 and the dissipation exponents
/// 0 <= rho < 1/2 < theta <= 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ModelParams {
    pub a: f64,
    pub b: f64,
    pub rho: f64,
    pub theta: f64,
    pub regime: Regime,
}

impl ModelParams {
    /// Validates raw inputs and classifies the regime.
    pub fn new(a: f64, b: f64, rho: f64, theta: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || !rho.is_finite() || !theta.is_finite() {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        if a <= 0.0 {
            return Err(Error::InvalidParams(format!("a must be positive (a = {a})")));
        }
        if b <= a {
            return Err(Error::InvalidParams(format!("b must exceed a (a = {a}, b = {b})")));
        }
        if rho < 0.0 {
            return Err(Error::InvalidParams(format!("rho must be nonnegative (rho = {rho})")));
        }
        if rho >= 0.5 {
            return Err(Error::InvalidParams(format!("rho must be below 1/2 (rho = {rho})")));
        }
        if theta <= 0.5 {
            return Err(Error::InvalidParams(format!("theta must exceed 1/2 (theta = {theta})")));
        }
        if theta > 1.0 {
            return Err(Error::InvalidParams(format!("theta must not exceed 1 (theta = {theta})")));
        }
        let s = rho + theta;
        let regime = if (s - 1.0).abs() <= REGIME_TOL {
            Regime::Equal
        } else if s < 1.0 {
            Regime::Below
        } else {
            Regime::Above
        };
        Ok(Self { a, b, rho, theta, regime })
    }

    /// Dissipation scalar sigma(r) = r^{2 rho} + r^{2 theta}.
    ///
    /// Uses the convention r^0 = 1 for every r including r = 0, so the
    /// friction case rho = 0 keeps sigma(0) = 1.
    pub fn sigma(&self, r: f64) -> f64 {
        debug_assert!(r >= 0.0);
        pow_conv(r, 2.0 * self.rho) + pow_conv(r, 2.0 * self.theta)
    }
}

/// Wire form of the parameters; the regime is always re-derived.
#[derive(Deserialize)]
struct RawParams {
    a: f64,
    b: f64,
    rho: f64,
    theta: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = String;

    fn try_from(raw: RawParams) -> std::result::Result<Self, String> {
        ModelParams::new(raw.a, raw.b, raw.rho, raw.theta).map_err(|e| e.to_string())
    }
}

/// r^p with r^0 = 1 for all r (the symbol of the identity operator).
pub(crate) fn pow_conv(r: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else {
        r.powf(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_valid_sets_and_classifies_regime() {
        let p = ModelParams::new(1.0, 2.0, 0.25, 0.75).unwrap();
        assert_eq!(p.regime, Regime::Equal);
        let p = ModelParams::new(1.0, 2.0, 0.2, 0.7).unwrap();
        assert_eq!(p.regime, Regime::Below);
        let p = ModelParams::new(1.0, 2.0, 0.3, 0.9).unwrap();
        assert_eq!(p.regime, Regime::Above);
    }

    #[test]
    fn rejects_each_constraint_violation() {
        assert!(matches!(
            ModelParams::new(2.0, 1.0, 0.25, 0.75),
            Err(Error::InvalidParams(msg)) if msg.contains("b must exceed a")
        ));
        assert!(ModelParams::new(-1.0, 2.0, 0.25, 0.75).is_err());
        assert!(ModelParams::new(1.0, 2.0, 0.5, 0.75).is_err());
        assert!(ModelParams::new(1.0, 2.0, 0.25, 0.5).is_err());
        assert!(ModelParams::new(1.0, 2.0, 0.25, 1.1).is_err());
        assert!(ModelParams::new(1.0, 2.0, -0.1, 0.75).is_err());
    }

    #[test]
    fn sigma_examples() {
        let p = ModelParams::new(1.0, 2.0, 0.25, 0.75).unwrap();
        assert_eq!(p.sigma(1.0), 2.0);
        assert!((p.sigma(0.01) - 0.101).abs() < 1e-15);
        // friction case: r^0 = 1 at r = 0
        let p = ModelParams::new(1.0, 2.0, 0.0, 1.0).unwrap();
        assert_eq!(p.sigma(0.0), 1.0);
    }
}
