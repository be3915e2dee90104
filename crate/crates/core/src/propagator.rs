//! Exact per-frequency evolution of the first-order system via closed-form
//! 2x2 block exponentials, the change of variables between (u, u_t) and the
//! 4-component unknown W, and the diagonal reference evolutions.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::FourierField;
use crate::linalg::{c, mat2_opnorm, mat2_vec, C64, Mat2, Mat4, Vec2, Vec4, ONE, ZERO};
use crate::params::{pow_conv, ModelParams, Regime};

/// e^{-B(r) t} stored as its two 2x2 blocks plus the interleaved 4x4 view.
#[derive(Debug, Clone)]
pub struct PropagatorBlock {
    pub r: f64,
    pub t: f64,
    pub block_b: Mat2,
    pub block_a: Mat2,
}

impl PropagatorBlock {
    /// The full 4x4 matrix on the original component ordering.
    pub fn matrix(&self) -> Mat4 {
        let mut m = [[ZERO; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                m[2 * i][2 * j] = self.block_b[i][j];
                m[2 * i + 1][2 * j + 1] = self.block_a[i][j];
            }
        }
        m
    }

    pub fn apply(&self, w: &Vec4) -> Vec4 {
        let wb = mat2_vec(&self.block_b, &[w[0], w[2]]);
        let wa = mat2_vec(&self.block_a, &[w[1], w[3]]);
        [wb[0], wa[0], wb[1], wa[1]]
    }

    /// Largest singular value; the blocks are orthogonal summands.
    pub fn opnorm(&self) -> f64 {
        mat2_opnorm(&self.block_b).max(mat2_opnorm(&self.block_a))
    }
}

/// sinh(z)/z, series for small |z|.
fn phi_sinh(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        let z2 = z * z;
        1.0 + z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sinh() / z
    }
}

/// sin(z)/z, series for small |z|.
fn phi_sin(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// e^{-block t} for one speed k, where block = (sigma/2) I + C with
/// C = [[-ikr, sigma/2], [sigma/2, ikr]] and C^2 = delta^2 I,
/// delta^2 = sigma^2/4 - k^2 r^2.
///
/// e^{-block t} = coef_i I + coef_c C with coef_i = e^{-sigma t/2} cosh(delta t)
/// and coef_c = -e^{-sigma t/2} sinh(delta t)/delta. For real delta both
/// coefficients are formed from e^{-lambda_± t} directly, which never
/// overflows since Re lambda_± >= 0.
fn block_exp(sigma: f64, k: f64, r: f64, t: f64) -> Mat2 {
    let half = sigma / 2.0;
    let delta_sq = half * half - k * k * r * r;
    let (coef_i, coef_c) = if delta_sq >= 0.0 {
        let delta = delta_sq.sqrt();
        if (delta * t).abs() < 1e-4 {
            let e = (-half * t).exp();
            (e * (delta * t).cosh(), -e * t * phi_sinh(delta * t))
        } else {
            // lambda_- = half - delta, lambda_+ = half + delta, both >= 0
            let em = (-(half - delta) * t).exp();
            let ep = (-(half + delta) * t).exp();
            ((em + ep) / 2.0, -(em - ep) / (2.0 * delta))
        }
    } else {
        let omega = (-delta_sq).sqrt();
        let e = (-half * t).exp();
        (e * (omega * t).cos(), -e * t * phi_sin(omega * t))
    };
    let ci = c(coef_i, 0.0);
    let cc = c(coef_c, 0.0);
    [
        [ci + cc * c(0.0, -k * r), cc * c(half, 0.0)],
        [cc * c(half, 0.0), ci + cc * c(0.0, k * r)],
    ]
}

/// Exact matrix exponential e^{-B(r) t}. Valid at r = 0 as well, where it
/// degenerates to the identity (rho > 0) or to the friction-case relaxation
/// (rho = 0).
pub fn block_propagator(p: &ModelParams, r: f64, t: f64) -> PropagatorBlock {
    debug_assert!(r >= 0.0 && t >= 0.0);
    if t == 0.0 {
        let id = [[ONE, ZERO], [ZERO, ONE]];
        return PropagatorBlock { r, t, block_b: id, block_a: id };
    }
    let sigma = p.sigma(r);
    PropagatorBlock {
        r,
        t,
        block_b: block_exp(sigma, p.b, r, t),
        block_a: block_exp(sigma, p.a, r, t),
    }
}

/// Direction of xi, with the deterministic convention eta = (1, 0) at xi = 0
/// (any unit vector works there since the |xi|-scaled terms vanish).
fn direction(xi: [f64; 2]) -> ([f64; 2], f64) {
    let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
    if r == 0.0 {
        ([1.0, 0.0], 0.0)
    } else {
        ([xi[0] / r, xi[1] / r], r)
    }
}

fn rotate(eta: [f64; 2], v: &Vec2) -> Vec2 {
    [
        v[0] * eta[0] + v[1] * eta[1],
        v[0] * eta[1] - v[1] * eta[0],
    ]
}

/// W = (v_t + i r diag(b,a) v, v_t - i r diag(b,a) v) with v = M(eta) u_hat,
/// v_t = M(eta) ut_hat.
pub fn u_to_w(u0_hat: &Vec2, u1_hat: &Vec2, xi: [f64; 2], p: &ModelParams) -> Vec4 {
    let (eta, r) = direction(xi);
    let v = rotate(eta, u0_hat);
    let vt = rotate(eta, u1_hat);
    let ib = c(0.0, r * p.b);
    let ia = c(0.0, r * p.a);
    [
        vt[0] + ib * v[0],
        vt[1] + ia * v[1],
        vt[0] - ib * v[0],
        vt[1] - ia * v[1],
    ]
}

/// Inverse of `u_to_w`. At xi = 0 the displacement is not recoverable from W
/// (it is tracked by `zero_mode_evolution`), so only nonzero frequencies are
/// accepted.
pub fn w_to_u(w: &Vec4, xi: [f64; 2], p: &ModelParams) -> Result<(Vec2, Vec2)> {
    let (eta, r) = direction(xi);
    if r == 0.0 {
        return Err(Error::ZeroModeDisplacement);
    }
    let vt = [(w[0] + w[2]) / 2.0, (w[1] + w[3]) / 2.0];
    let v = [
        (w[0] - w[2]) / (2.0 * c(0.0, r * p.b)),
        (w[1] - w[3]) / (2.0 * c(0.0, r * p.a)),
    ];
    Ok((rotate(eta, &v), rotate(eta, &vt)))
}

/// Evolution of the xi = 0 Fourier mode: u_hat_tt + sigma(0) u_hat_t = 0.
pub fn zero_mode_evolution(
    u0_hat0: &Vec2,
    u1_hat0: &Vec2,
    p: &ModelParams,
    t: f64,
) -> (Vec2, Vec2) {
    debug_assert!(t >= 0.0);
    if p.rho > 0.0 {
        // sigma(0) = 0: undamped linear drift of the mean displacement
        let tt = c(t, 0.0);
        (
            [u0_hat0[0] + tt * u1_hat0[0], u0_hat0[1] + tt * u1_hat0[1]],
            *u1_hat0,
        )
    } else {
        // sigma(0) = 1: u_hat(t) = u0 + (1 - e^{-t}) u1
        let decay = c((-t).exp(), 0.0);
        let gain = ONE - decay;
        (
            [u0_hat0[0] + gain * u1_hat0[0], u0_hat0[1] + gain * u1_hat0[1]],
            [decay * u1_hat0[0], decay * u1_hat0[1]],
        )
    }
}

/// The four diagonal rates of the regime's reference parabolic system,
/// ordered like the eigenvalue branches.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceRates {
    pub rates: [f64; 4],
}

/// Reference rates at r > 0. The first two are b^2 r^{2-2 rho} and
/// a^2 r^{2-2 rho} in every regime; the last two follow the regime's
/// reference system. Fails when a rate is nonpositive — the caller must
/// stay inside the interior-zone support.
pub fn reference_rates(p: &ModelParams, r: f64) -> Result<ReferenceRates> {
    debug_assert!(r > 0.0);
    let slow = pow_conv(r, 2.0 - 2.0 * p.rho);
    let r_2rho = pow_conv(r, 2.0 * p.rho);
    let r_2theta = pow_conv(r, 2.0 * p.theta);
    let (a2, b2) = (p.a * p.a, p.b * p.b);
    let (l3, l4) = match p.regime {
        Regime::Below => (r_2rho + r_2theta - b2 * slow, r_2rho + r_2theta - a2 * slow),
        Regime::Equal => (r_2rho + (1.0 - b2) * slow, r_2rho + (1.0 - a2) * slow),
        Regime::Above => (r_2rho - b2 * slow, r_2rho - a2 * slow),
    };
    let rates = [b2 * slow, a2 * slow, l3, l4];
    for &rate in &rates {
        if rate <= 0.0 {
            return Err(Error::NonPositiveReferenceRate { r, rate });
        }
    }
    Ok(ReferenceRates { rates })
}

/// T1 diag(e^{-rate t}) T1^{-1} applied to w. T1^{-1} = T1/2, so the action
/// is written out directly on the coupled pairs (w1, w3) and (w2, w4):
/// T1-coordinates are ((w3 - w1)/2, (w4 - w2)/2, (w1 + w3)/2, (w2 + w4)/2).
pub fn reference_apply(p: &ModelParams, r: f64, t: f64, w: &Vec4) -> Result<Vec4> {
    let rr = reference_rates(p, r)?;
    let e: Vec<C64> = rr.rates.iter().map(|&l| c((-l * t).exp(), 0.0)).collect();
    let d1 = (w[2] - w[0]) / 2.0 * e[0];
    let d2 = (w[3] - w[1]) / 2.0 * e[1];
    let s1 = (w[0] + w[2]) / 2.0 * e[2];
    let s2 = (w[1] + w[3]) / 2.0 * e[3];
    Ok([s1 - d1, s2 - d2, s1 + d1, s2 + d2])
}

/// Evolves a 4-component W field to each requested time by applying the
/// exact block propagator at every node (including r = 0, where the block
/// exponential degenerates correctly for both rho > 0 and rho = 0).
pub fn evolve(p: &ModelParams, w0: &FourierField, times: &[f64]) -> Result<Vec<FourierField>> {
    if w0.components != 4 {
        return Err(Error::DimensionMismatch(format!(
            "evolve expects 4 components, got {}",
            w0.components
        )));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::TimesNotIncreasing);
    }
    let radii = w0.grid.radii();
    Ok(times
        .iter()
        .map(|&t| {
            let n_nodes = radii.len();
            let mut data = vec![ZERO; 4 * n_nodes];
            data.par_chunks_mut(4)
                .zip(radii.par_iter())
                .enumerate()
                .for_each(|(idx, (chunk, &r))| {
                    let prop = block_propagator(p, r, t);
                    let w = [
                        w0.data[4 * idx],
                        w0.data[4 * idx + 1],
                        w0.data[4 * idx + 2],
                        w0.data[4 * idx + 3],
                    ];
                    chunk.copy_from_slice(&prop.apply(&w));
                });
            FourierField { grid: w0.grid, components: 4, data }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{mat4_mul, mat4_max_abs_diff, mat4_identity, vec4_norm_sq, vec4_sub};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p_equal() -> ModelParams {
        ModelParams::new(1.0, 2.0, 0.25, 0.75).unwrap()
    }

    #[test]
    fn identity_at_time_zero() {
        let p = p_equal();
        let m = block_propagator(&p, 3.7, 0.0).matrix();
        assert_eq!(mat4_max_abs_diff(&m, &mat4_identity()), 0.0);
    }

    #[test]
    fn degenerate_double_root_block() {
        // at r = 1 the a-block has delta = 0: e^{-t}(I - t C_a)
        let p = p_equal();
        let t = 0.3;
        let prop = block_propagator(&p, 1.0, t);
        let e = (-t).exp();
        // C_a = [[-i, 1], [1, i]]
        let expect = [
            [c(e, e * t), c(-e * t, 0.0)],
            [c(-e * t, 0.0), c(e, -e * t)],
        ];
        for i in 0..2 {
            for j in 0..2 {
                assert!((prop.block_a[i][j] - expect[i][j]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn eigenvalues_of_propagator_match_exponentials() {
        let p = ModelParams::new(0.9, 1.7, 0.1, 0.95).unwrap();
        for &(r, t) in &[(0.3, 2.0), (5.0, 0.7), (0.01, 40.0)] {
            let prop = block_propagator(&p, r, t);
            let eig = crate::symbol::exact_eigenvalues(&p, r);
            // trace of each block = sum of its two propagator eigenvalues
            let tr_b = prop.block_b[0][0] + prop.block_b[1][1];
            let expect_b = (-eig.lambda1() * t).exp() + (-eig.lambda3() * t).exp();
            assert!((tr_b - expect_b).norm() < 1e-12 * expect_b.norm().max(1.0));
            let tr_a = prop.block_a[0][0] + prop.block_a[1][1];
            let expect_a = (-eig.lambda2() * t).exp() + (-eig.lambda4() * t).exp();
            assert!((tr_a - expect_a).norm() < 1e-12 * expect_a.norm().max(1.0));
        }
    }

    #[test]
    fn no_overflow_at_extreme_frequency_and_time() {
        let p = p_equal();
        let prop = block_propagator(&p, 1e4, 1e4);
        assert!(prop.opnorm().is_finite());
        let prop = block_propagator(&p, 1e-6, 1e8);
        assert!(prop.opnorm().is_finite());
    }

    #[test]
    fn series_and_closed_form_branches_agree_at_crossover() {
        // just inside the series branch (|delta t| < 1e-4): the closed form
        // evaluated at the same point must agree to 1e-10
        let p = p_equal();
        let r = 0.5;
        let sigma = p.sigma(r);
        let half = sigma / 2.0;
        let delta = (half * half - p.a * p.a * r * r).sqrt();
        let t = 0.99e-4 / delta;
        let m_series = block_exp(sigma, p.a, r, t);
        let em = (-(half - delta) * t).exp();
        let ep = (-(half + delta) * t).exp();
        let coef_i = (em + ep) / 2.0;
        let coef_c = -(em - ep) / (2.0 * delta);
        let closed = [
            [
                c(coef_i, -coef_c * p.a * r),
                c(coef_c * half, 0.0),
            ],
            [
                c(coef_c * half, 0.0),
                c(coef_i, coef_c * p.a * r),
            ],
        ];
        for i in 0..2 {
            for j in 0..2 {
                assert!((m_series[i][j] - closed[i][j]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn u_w_round_trip_and_energy_identity() {
        let p = p_equal();
        let xi = [0.6, -1.1];
        let u0 = [c(0.3, -0.2), c(1.1, 0.4)];
        let u1 = [c(-0.5, 0.9), c(0.2, 0.1)];
        let w = u_to_w(&u0, &u1, xi, &p);
        let (u0b, u1b) = w_to_u(&w, xi, &p).unwrap();
        for i in 0..2 {
            assert!((u0[i] - u0b[i]).norm() < 1e-12);
            assert!((u1[i] - u1b[i]).norm() < 1e-12);
        }
        // |W|^2 = 2|u1|^2 + 2 a^2 |xi|^2 |u0|^2 + 2 (b^2-a^2) |xi . u0|^2
        let r2 = xi[0] * xi[0] + xi[1] * xi[1];
        let dot = xi[0] * u0[0] + xi[1] * u0[1];
        let expect = 2.0 * (u1[0].norm_sqr() + u1[1].norm_sqr())
            + 2.0 * p.a * p.a * r2 * (u0[0].norm_sqr() + u0[1].norm_sqr())
            + 2.0 * (p.b * p.b - p.a * p.a) * dot.norm_sqr();
        assert_relative_eq!(vec4_norm_sq(&w), expect, max_relative = 1e-12);
    }

    #[test]
    fn u_to_w_axis_example_and_zero_mode() {
        let p = p_equal();
        let w = u_to_w(&[ONE, ZERO], &[ZERO, ZERO], [1.0, 0.0], &p);
        assert_eq!(w, [c(0.0, 2.0), ZERO, c(0.0, -2.0), ZERO]);
        let w0 = u_to_w(&[ONE, ONE], &[c(2.0, 1.0), ONE], [0.0, 0.0], &p);
        // at xi = 0: W = (v_t, v_t) with v_t = M((1,0)) u1 = (u1_x, -u1_y)
        assert_eq!(w0[0], c(2.0, 1.0));
        assert_eq!(w0[1], c(-1.0, 0.0));
        assert_eq!(w0[2], w0[0]);
        assert!(matches!(
            w_to_u(&w0, [0.0, 0.0], &p),
            Err(Error::ZeroModeDisplacement)
        ));
    }

    #[test]
    fn zero_mode_drift_and_friction_relaxation() {
        let p = p_equal();
        let u0 = [ONE, ZERO];
        let u1 = [c(0.5, 0.0), c(0.0, 1.0)];
        let (u, ut) = zero_mode_evolution(&u0, &u1, &p, 10.0);
        assert_eq!(u[0], c(6.0, 0.0));
        assert_eq!(ut, u1);
        let pf = ModelParams::new(1.0, 2.0, 0.0, 1.0).unwrap();
        let (u, ut) = zero_mode_evolution(&u0, &u1, &pf, 1e3);
        // t -> infinity: u -> u0 + u1, u_t -> 0
        assert!((u[0] - c(1.5, 0.0)).norm() < 1e-12);
        assert!(ut[0].norm() < 1e-12);
    }

    #[test]
    fn reference_rates_regime_examples() {
        let p = p_equal();
        let rr = reference_rates(&p, 0.01).unwrap();
        assert_relative_eq!(rr.rates[0], 0.004, max_relative = 1e-12);
        assert_relative_eq!(rr.rates[1], 0.001, max_relative = 1e-12);
        assert_relative_eq!(rr.rates[2], 0.097, max_relative = 1e-12);
        assert_relative_eq!(rr.rates[3], 0.1, max_relative = 1e-12);
        // equal regime: rate 3 goes negative for r > 1/sqrt(3)
        assert!(matches!(
            reference_rates(&p, 1.0),
            Err(Error::NonPositiveReferenceRate { .. })
        ));
        let below = ModelParams::new(1.0, 2.0, 0.2, 0.7).unwrap();
        let r: f64 = 0.01;
        let rr = reference_rates(&below, r).unwrap();
        let expect = r.powf(0.4) + r.powf(1.4) - 4.0 * r.powf(1.6);
        assert_relative_eq!(rr.rates[2], expect, max_relative = 1e-13);
    }

    #[test]
    fn reference_apply_is_identity_at_time_zero() {
        let p = p_equal();
        let w = [c(0.3, 1.0), c(-0.4, 0.2), c(0.9, -0.1), c(0.0, 0.7)];
        let out = reference_apply(&p, 0.05, 0.0, &w).unwrap();
        assert!(vec4_norm_sq(&vec4_sub(&out, &w)).sqrt() < 1e-14);
    }

    proptest! {
        #[test]
        fn semigroup_property(
            r in 1e-3f64..1e3,
            t1 in 0.0f64..50.0,
            t2 in 0.0f64..50.0,
        ) {
            let p = p_equal();
            let one_step = block_propagator(&p, r, t1 + t2).matrix();
            let two_step = mat4_mul(
                &block_propagator(&p, r, t1).matrix(),
                &block_propagator(&p, r, t2).matrix(),
            );
            prop_assert!(mat4_max_abs_diff(&one_step, &two_step) < 1e-10);
        }

        #[test]
        fn ode_residual(r in 1e-2f64..1e2, t in 0.1f64..20.0) {
            // d/dt e^{-Bt} = -B e^{-Bt}, centered finite difference
            let p = p_equal();
            let sigma = p.sigma(r);
            let h = 1e-6 * 1.0f64.max(1.0 / sigma);
            let mp = block_propagator(&p, r, t + h).matrix();
            let mm = block_propagator(&p, r, t - h).matrix();
            let b = crate::symbol::assemble_symbol(&p, r).full;
            let rhs = mat4_mul(&b, &block_propagator(&p, r, t).matrix());
            let mut err = 0.0f64;
            let mut scale = 0.0f64;
            for i in 0..4 {
                for j in 0..4 {
                    let deriv = (mp[i][j] - mm[i][j]) / (2.0 * h);
                    err = err.max((deriv + rhs[i][j]).norm());
                    scale = scale.max(rhs[i][j].norm());
                }
            }
            prop_assert!(err <= 1e-5 * scale.max(1.0));
        }
    }
}
