//! The 4x4 frequency symbol, its closed-form eigenvalues, the principal
//! (asymptotic) eigenvalues for small and large radial frequency, and the
//! constant structure matrices used by the diagonalization and by the
//! reference parabolic systems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, C64, Mat2, Mat4, ZERO};
use crate::params::{pow_conv, ModelParams, Regime};

/// Which asymptotic band the principal eigenvalue formulas target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrequencyRegime {
    Small,
    Large,
}

/// Branch labels for the four eigenvalues, in storage order.
///
/// "Minus" roots (indices 0, 1) are the diffusive branches at small
/// frequency; when the block discriminant is negative, "minus" is the root
/// with negative imaginary part.
pub const BRANCH_LABELS: [&str; 4] = ["b-minus", "a-minus", "b-plus", "a-plus"];

/// The coefficient matrix B(r) = (sigma/2) B0 + i r B1 at radial frequency r,
/// together with its two decoupled 2x2 blocks.
///
/// The full matrix decouples under the index grouping {1,3} (speed-b block)
/// and {2,4} (speed-a block); all cross-group entries are exactly zero.
#[derive(Debug, Clone)]
pub struct SpectralSymbol {
    pub r: f64,
    pub sigma: f64,
    pub full: Mat4,
    pub block_b: Mat2,
    pub block_a: Mat2,
}

/// Four complex decay rates, ordered (b-minus, a-minus, b-plus, a-plus).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenQuadruple {
    pub lambda: [C64; 4],
}

impl EigenQuadruple {
    pub fn lambda1(&self) -> C64 {
        self.lambda[0]
    }
    pub fn lambda2(&self) -> C64 {
        self.lambda[1]
    }
    pub fn lambda3(&self) -> C64 {
        self.lambda[2]
    }
    pub fn lambda4(&self) -> C64 {
        self.lambda[3]
    }
}

/// Constant matrices of the first-order system and its diagonalization,
/// plus the frequency-dependent correctors N2(r), N3(r).
#[derive(Debug, Clone)]
pub struct StructureMatrices {
    pub b0: [[f64; 4]; 4],
    pub b1: [[f64; 4]; 4],
    pub t1: [[f64; 4]; 4],
    pub t1_inv: [[f64; 4]; 4],
    pub m1: [[f64; 4]; 4],
    pub m2: [[f64; 4]; 4],
    pub n2: Mat4,
    pub n3: Mat4,
}

/// A(eta) = a^2 I + (b^2 - a^2) eta eta^T and the rotation M(eta) whose
/// columns are eta and its perpendicular. M is symmetric, involutive
/// (M M = I), and diagonalizes A: M^{-1} A M = diag(b^2, a^2).
pub fn stiffness_and_rotation(
    p: &ModelParams,
    eta: [f64; 2],
) -> Result<([[f64; 2]; 2], [[f64; 2]; 2])> {
    let norm = (eta[0] * eta[0] + eta[1] * eta[1]).sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NonUnitDirection(norm));
    }
    let d = p.b * p.b - p.a * p.a;
    let a2 = p.a * p.a;
    let a_mat = [
        [a2 + d * eta[0] * eta[0], d * eta[0] * eta[1]],
        [d * eta[0] * eta[1], a2 + d * eta[1] * eta[1]],
    ];
    let m_mat = [[eta[0], eta[1]], [eta[1], -eta[0]]];
    Ok((a_mat, m_mat))
}

/// Builds B(r) and its two blocks.
pub fn assemble_symbol(p: &ModelParams, r: f64) -> SpectralSymbol {
    debug_assert!(r >= 0.0);
    let sigma = p.sigma(r);
    let h = sigma / 2.0;
    let block = |k: f64| -> Mat2 {
        [
            [c(h, -k * r), c(h, 0.0)],
            [c(h, 0.0), c(h, k * r)],
        ]
    };
    let block_b = block(p.b);
    let block_a = block(p.a);
    let mut full = [[ZERO; 4]; 4];
    // interleave the blocks back onto indices {0,2} and {1,3}
    for bi in 0..2 {
        for bj in 0..2 {
            full[2 * bi][2 * bj] = block_b[bi][bj];
            full[2 * bi + 1][2 * bj + 1] = block_a[bi][bj];
        }
    }
    SpectralSymbol { r, sigma, full, block_b, block_a }
}

/// Roots of lambda^2 - sigma lambda + k^2 r^2 per block, via the quadratic
/// formula with an explicit discriminant case split.
fn block_roots(sigma: f64, k: f64, r: f64) -> (C64, C64) {
    let disc = sigma * sigma - 4.0 * k * k * r * r;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        // subtract the smaller magnitude from sigma first to avoid cancellation
        let plus = (sigma + sq) / 2.0;
        let minus = if plus > 0.0 { k * k * r * r / plus } else { 0.0 };
        (c(minus, 0.0), c(plus, 0.0))
    } else {
        let sq = (-disc).sqrt();
        (c(sigma / 2.0, -sq / 2.0), c(sigma / 2.0, sq / 2.0))
    }
}

/// Closed-form eigenvalues of B(r), from the factorization
/// (lambda^2 - sigma lambda + b^2 r^2)(lambda^2 - sigma lambda + a^2 r^2).
pub fn exact_eigenvalues(p: &ModelParams, r: f64) -> EigenQuadruple {
    let sigma = p.sigma(r);
    let (b_minus, b_plus) = block_roots(sigma, p.b, r);
    let (a_minus, a_plus) = block_roots(sigma, p.a, r);
    EigenQuadruple { lambda: [b_minus, a_minus, b_plus, a_plus] }
}

/// Principal (leading asymptotic) eigenvalues in the requested band.
/// The returned values are real; they are stored as complex to share the
/// residual arithmetic with `exact_eigenvalues`.
pub fn principal_eigenvalues(p: &ModelParams, r: f64, regime: FrequencyRegime) -> EigenQuadruple {
    debug_assert!(r > 0.0);
    let (a2, b2) = (p.a * p.a, p.b * p.b);
    let vals: [f64; 4] = match regime {
        FrequencyRegime::Small => {
            let slow = pow_conv(r, 2.0 - 2.0 * p.rho);
            let r_2rho = pow_conv(r, 2.0 * p.rho);
            let r_2theta = pow_conv(r, 2.0 * p.theta);
            match p.regime {
                Regime::Below => [
                    b2 * slow,
                    a2 * slow,
                    r_2rho + r_2theta - b2 * slow,
                    r_2rho + r_2theta - a2 * slow,
                ],
                Regime::Equal => [
                    b2 * slow,
                    a2 * slow,
                    r_2rho + (1.0 - b2) * slow,
                    r_2rho + (1.0 - a2) * slow,
                ],
                Regime::Above => [
                    b2 * slow,
                    a2 * slow,
                    r_2rho - b2 * slow,
                    r_2rho - a2 * slow,
                ],
            }
        }
        FrequencyRegime::Large => {
            let slow = pow_conv(r, 2.0 - 2.0 * p.theta);
            let r_2rho = pow_conv(r, 2.0 * p.rho);
            let r_2theta = pow_conv(r, 2.0 * p.theta);
            match p.regime {
                Regime::Below => [
                    b2 * slow,
                    a2 * slow,
                    r_2theta - b2 * slow,
                    r_2theta - a2 * slow,
                ],
                Regime::Equal => [
                    b2 * slow,
                    a2 * slow,
                    r_2theta + (1.0 - b2) * slow,
                    r_2theta + (1.0 - a2) * slow,
                ],
                Regime::Above => [
                    b2 * slow,
                    a2 * slow,
                    r_2theta + r_2rho - b2 * slow,
                    r_2theta + r_2rho - a2 * slow,
                ],
            }
        }
    };
    EigenQuadruple { lambda: vals.map(|v| c(v, 0.0)) }
}

/// Order of the remainder term in the principal eigenvalue expansions.
pub fn predicted_remainder_exponent(p: &ModelParams, regime: FrequencyRegime) -> f64 {
    match (regime, p.regime) {
        (FrequencyRegime::Small, Regime::Below) => 1.0 + 2.0 * p.theta - 2.0 * p.rho,
        (FrequencyRegime::Small, Regime::Equal) => 3.0 - 4.0 * p.rho,
        (FrequencyRegime::Small, Regime::Above) => (3.0 - 4.0 * p.rho).min(2.0 * p.theta),
        (FrequencyRegime::Large, Regime::Below) => (3.0 - 4.0 * p.theta).min(2.0 * p.rho),
        (FrequencyRegime::Large, Regime::Equal) => 3.0 - 4.0 * p.theta,
        (FrequencyRegime::Large, Regime::Above) => 1.0 + 2.0 * p.rho - 2.0 * p.theta,
    }
}

/// Coefficients of the characteristic quartic of B(r), highest degree first:
/// lambda^4 - 2 sigma lambda^3 + (sigma^2 + (a^2+b^2) r^2) lambda^2
/// - (a^2+b^2) r^2 sigma lambda + a^2 b^2 r^4.
pub fn characteristic_quartic(p: &ModelParams, r: f64) -> [f64; 5] {
    let sigma = p.sigma(r);
    let s2 = p.a * p.a + p.b * p.b;
    [
        1.0,
        -2.0 * sigma,
        sigma * sigma + s2 * r * r,
        -s2 * r * r * sigma,
        p.a * p.a * p.b * p.b * r.powi(4),
    ]
}

/// Expands (lambda^2 - sigma lambda + b^2 r^2)(lambda^2 - sigma lambda + a^2 r^2),
/// highest degree first. Must agree with `characteristic_quartic`.
pub fn factored_quartic(p: &ModelParams, r: f64) -> [f64; 5] {
    let sigma = p.sigma(r);
    let (pb, pa) = (p.b * p.b * r * r, p.a * p.a * r * r);
    // (x^2 + c1 x + d1)(x^2 + c1 x + d2) with c1 = -sigma
    [
        1.0,
        -2.0 * sigma,
        sigma * sigma + pa + pb,
        -sigma * (pa + pb),
        pa * pb,
    ]
}

fn antidiag_pattern(scale: f64, b: f64, a: f64) -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    m[0][2] = c(0.0, scale * b);
    m[1][3] = c(0.0, scale * a);
    m[2][0] = c(0.0, -scale * b);
    m[3][1] = c(0.0, -scale * a);
    m
}

/// All constant matrices plus N2(r), N3(r).
///
/// At r = 0 both correctors are returned as zero: N2 because its scale
/// r^{1-2 rho} vanishes (rho < 1/2), N3 because it is an exterior-zone
/// object with a negative exponent, never used at the origin.
pub fn structure_matrices(p: &ModelParams, r: f64) -> StructureMatrices {
    debug_assert!(r >= 0.0);
    let b0 = [
        [1.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 1.0],
        [1.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 1.0],
    ];
    let mut b1 = [[0.0; 4]; 4];
    b1[0][0] = -p.b;
    b1[1][1] = -p.a;
    b1[2][2] = p.b;
    b1[3][3] = p.a;
    let t1 = [
        [-1.0, 0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0, 1.0],
        [1.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 1.0],
    ];
    // T1 is twice its own inverse
    let mut t1_inv = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            t1_inv[i][j] = t1[i][j] / 2.0;
        }
    }
    let mut m1 = [[0.0; 4]; 4];
    m1[0][0] = p.b * p.b;
    m1[1][1] = p.a * p.a;
    m1[2][2] = -p.b * p.b;
    m1[3][3] = -p.a * p.a;
    let mut m2 = [[0.0; 4]; 4];
    m2[2][2] = 1.0;
    m2[3][3] = 1.0;
    let n2_scale = if r == 0.0 { 0.0 } else { r.powf(1.0 - 2.0 * p.rho) };
    let n3_scale = if r == 0.0 { 0.0 } else { r.powf(1.0 - 2.0 * p.theta) };
    StructureMatrices {
        b0,
        b1,
        t1,
        t1_inv,
        m1,
        m2,
        n2: antidiag_pattern(n2_scale, p.b, p.a),
        n3: antidiag_pattern(n3_scale, p.b, p.a),
    }
}
