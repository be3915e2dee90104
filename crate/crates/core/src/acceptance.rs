//! The quantitative acceptance suite: ten desk-scale checks covering the
//! eigenvalue factorization, asymptotic orders, bounded-zone stability, the
//! pointwise envelope, decay-rate sharpness, the weighted-data improvement,
//! the diffusion refinement with its rho + theta = 1 threshold, exterior
//! smoothing, and the infrastructure invariants. Shared by the integration
//! test target and the `verify-all` subcommand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{
    exterior_gap_coefficient, gevrey_indicator, log_spaced, norm_series, operator_envelope,
    refinement_q, remainder_certificate, residual_order_fit, theoretical_rates, BranchFit,
    DataClass, NormTarget, Pipeline, StudyConfig,
};
use crate::data::{make_initial_data, moment_bound_check, DataTarget, InitialDataSpec, ProfileKind};
use crate::fitting::fit_decay;
use crate::grid::{sobolev_norm, transform, Direction, FourierField, GridSpec};
use crate::linalg::{c, mat4_mul, mat4_max_abs_diff, vec4_norm_sq, Vec4};
use crate::params::ModelParams;
use crate::propagator::{block_propagator, u_to_w, w_to_u};
use crate::symbol::{
    assemble_symbol, characteristic_quartic, exact_eigenvalues, factored_quartic,
    predicted_remainder_exponent, FrequencyRegime,
};
use crate::zones::{pointwise_constants_fit, spectral_gap_scan, ZoneConfig};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    fn new(id: usize, name: &'static str, passed: bool, detail: String) -> Self {
        Self { id, name, passed, detail }
    }
}

fn regime_sets() -> [ModelParams; 3] {
    [
        ModelParams::new(1.0, 2.0, 0.2, 0.7).unwrap(),
        ModelParams::new(1.0, 2.0, 0.25, 0.75).unwrap(),
        ModelParams::new(1.0, 2.0, 0.3, 0.9).unwrap(),
    ]
}

fn random_params(rng: &mut impl Rng) -> (ModelParams, f64) {
    let a = rng.gen_range(0.2..2.0);
    let b = a + rng.gen_range(0.1..2.0);
    let rho = rng.gen_range(0.0..0.499);
    let theta = rng.gen_range(0.501..1.0);
    let r = 10f64.powf(rng.gen_range(-3.0..3.0));
    (ModelParams::new(a, b, rho, theta).unwrap(), r)
}

/// Criterion 1: the characteristic quartic factors into the two block
/// quadratics, and the closed-form eigenvalues match an independent dense
/// eigensolver.
pub fn criterion_1(seed: u64) -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_coeff = 0.0f64;
    let mut worst_eig = 0.0f64;
    for _ in 0..100 {
        let (p, r) = random_params(&mut rng);
        let q = characteristic_quartic(&p, r);
        let f = factored_quartic(&p, r);
        for k in 0..5 {
            let scale = q[k].abs().max(f[k].abs()).max(1e-300);
            worst_coeff = worst_coeff.max((q[k] - f[k]).abs() / scale);
        }
        let closed = exact_eigenvalues(&p, r);
        let dense = crate::oracle::dense_eigenvalues(&assemble_symbol(&p, r).full);
        let scale = closed.lambda.iter().map(|l| l.norm()).fold(1e-300, f64::max);
        // greedy nearest matching between the two unordered quadruples
        for d in dense {
            let best = closed
                .lambda
                .iter()
                .map(|l| (l - d).norm())
                .fold(f64::INFINITY, f64::min);
            worst_eig = worst_eig.max(best / scale);
        }
    }
    let passed = worst_coeff <= 1e-12 && worst_eig <= 1e-10;
    CriterionResult::new(
        1,
        "factorization & eigenvalue oracle",
        passed,
        format!("max coeff err {worst_coeff:.2e}, max eig err {worst_eig:.2e}"),
    )
}

fn order_criterion(id: usize, name: &'static str, regime: FrequencyRegime) -> CriterionResult {
    let band = match regime {
        FrequencyRegime::Small => (1e-4, 1e-2),
        FrequencyRegime::Large => (1e2, 1e4),
    };
    let mut passed = true;
    let mut details = Vec::new();
    for p in regime_sets() {
        match regime {
            FrequencyRegime::Small => {
                // literal order fit: slope must not fall below the predicted order
                let predicted = predicted_remainder_exponent(&p, regime);
                let fits = residual_order_fit(&p, regime, band, 40).unwrap();
                for (j, fit) in fits.iter().enumerate() {
                    match fit {
                        BranchFit::ExactToPrecision => {}
                        BranchFit::Fitted { slope, .. } => {
                            if *slope < predicted - 0.15 {
                                passed = false;
                                details.push(format!(
                                    "({},{}) branch {j}: slope {slope:.3} < {predicted:.3}-0.15",
                                    p.rho, p.theta
                                ));
                            }
                        }
                    }
                }
            }
            FrequencyRegime::Large => {
                // bounded-remainder certificate: max |residual|/r^env stays O(1).
                // At large r a residual with interior sign changes (and terms
                // of opposing orders) makes the raw log-log slope unreliable,
                // so the envelope constant is the assertable form of the
                // O(r^env) bound.
                let ks = remainder_certificate(&p, regime, band, 40);
                for (j, k) in ks.iter().enumerate() {
                    if let Some(k) = k {
                        if *k > 10.0 {
                            passed = false;
                            details.push(format!(
                                "({},{}) branch {j}: envelope constant {k:.3} > 10",
                                p.rho, p.theta
                            ));
                        }
                    }
                }
            }
        }
    }
    let detail = if details.is_empty() { "all branches within bounds".into() } else { details.join("; ") };
    CriterionResult::new(id, name, passed, detail)
}

/// Criterion 2: small-frequency remainder orders.
pub fn criterion_2() -> CriterionResult {
    order_criterion(2, "small-frequency asymptotic orders", FrequencyRegime::Small)
}

/// Criterion 3: large-frequency remainder bound.
pub fn criterion_3() -> CriterionResult {
    order_criterion(3, "large-frequency asymptotic orders", FrequencyRegime::Large)
}

/// Criterion 4: bounded-zone spectral gap and imaginary-root margin.
pub fn criterion_4() -> CriterionResult {
    let zone = ZoneConfig::default();
    let mut passed = true;
    let mut details = Vec::new();
    for p in regime_sets() {
        match spectral_gap_scan(&p, &zone, 100_000) {
            Ok(cert) => {
                if cert.min_real_part < 1e-3 || cert.identity_margin <= 0.0 {
                    passed = false;
                }
                details.push(format!(
                    "({},{}): gap {:.4} at r={:.3}, margin {:.3}",
                    p.rho, p.theta, cert.min_real_part, cert.argmin_r, cert.identity_margin
                ));
            }
            Err(e) => {
                passed = false;
                details.push(format!("({},{}): {e}", p.rho, p.theta));
            }
        }
    }
    CriterionResult::new(4, "bounded-zone stability", passed, details.join("; "))
}

/// Criterion 5: sampled pointwise envelope constants (C <= 100, c > 0).
pub fn criterion_5() -> CriterionResult {
    let r = log_spaced(1e-3, 1e3, 31);
    let t = [0.0, 1.0, 10.0, 100.0];
    let mut passed = true;
    let mut details = Vec::new();
    for p in regime_sets() {
        match pointwise_constants_fit(&p, &r, &t) {
            Ok((c_big, c_rate)) => {
                if !(c_rate > 0.0 && c_big <= 100.0) {
                    passed = false;
                }
                details.push(format!("({},{}): C={c_big:.2}, c={c_rate:.4}", p.rho, p.theta));
            }
            Err(e) => {
                passed = false;
                details.push(format!("({},{}): {e}", p.rho, p.theta));
            }
        }
    }
    CriterionResult::new(5, "pointwise estimate constants", passed, details.join("; "))
}

fn study_times() -> Vec<f64> {
    log_spaced(1e2, 1e4, 25)
}

fn system_data(kind: ProfileKind) -> InitialDataSpec {
    InitialDataSpec { kind, width: 1.0, amplitude: 1.0, target: DataTarget::System }
}

fn polar_study(p: ModelParams, data: InitialDataSpec, s: f64, class: DataClass) -> StudyConfig {
    StudyConfig {
        params: p,
        data,
        s,
        class,
        pipeline: Pipeline::Polar,
        times: study_times(),
        zone: ZoneConfig::default(),
        grid: None,
    }
}

/// Criterion 6: energy decay sharpness for the nonzero-mean Gaussian class.
/// The (s, m) = (0, 2) row has no attaining datum (every fixed L^2 datum
/// over-decays), so it measures the operator envelope, whose slope the
/// estimate pins at 0 exactly.
pub fn criterion_6() -> CriterionResult {
    let window = (1e2, 1e4);
    let sets = [
        ModelParams::new(1.0, 2.0, 0.25, 0.75).unwrap(),
        ModelParams::new(1.0, 2.0, 0.0, 1.0).unwrap(),
    ];
    let mut passed = true;
    let mut details = Vec::new();
    for p in sets {
        for (s, m) in [(0.0, 1.0), (1.0, 1.0), (0.0, 2.0)] {
            let class = DataClass::Lebesgue { m };
            let (base, _) = theoretical_rates(&p, s, class).unwrap();
            let slope = if m == 2.0 {
                let samples = log_spaced(1e-8, 30.0, 600);
                let series: Vec<(f64, f64)> = study_times()
                    .iter()
                    .map(|&t| (t, operator_envelope(&p, s, t, &samples)))
                    .collect();
                fit_decay(&series, window).unwrap().slope
            } else {
                let cfg = polar_study(p, system_data(ProfileKind::Gaussian), s, class);
                let series = norm_series(&cfg, NormTarget::Solution).unwrap();
                fit_decay(&series, window).unwrap().slope
            };
            let err = (slope + base).abs();
            if err > 0.1 {
                passed = false;
            }
            details.push(format!(
                "rho={} s={s} m={m}: slope {slope:.3} vs -{base:.3}",
                p.rho
            ));
        }
    }
    CriterionResult::new(6, "energy decay sharpness", passed, details.join("; "))
}

/// Criterion 7: zero-mean weighted data decays one full weighted order faster.
pub fn criterion_7() -> CriterionResult {
    let p = ModelParams::new(1.0, 2.0, 0.25, 0.75).unwrap();
    let class = DataClass::Weighted { gamma: 1.0 };
    let (base, _) = theoretical_rates(&p, 0.0, class).unwrap();
    let cfg = polar_study(p, system_data(ProfileKind::GaussianDerivative), 0.0, class);
    let series = norm_series(&cfg, NormTarget::Solution).unwrap();
    let slope = fit_decay(&series, (1e2, 1e4)).unwrap().slope;
    let passed = (slope + base).abs() <= 0.1;
    CriterionResult::new(
        7,
        "weighted-data improvement",
        passed,
        format!("slope {slope:.3} vs -{base:.3}"),
    )
}

/// Criterion 8: interior diffusion refinement plus the algebraic threshold
/// behavior of q.
pub fn criterion_8() -> CriterionResult {
    let window = (1e2, 1e4);
    let mut passed = true;
    let mut details = Vec::new();
    for p in regime_sets() {
        let class = DataClass::Lebesgue { m: 1.0 };
        let (_, q) = theoretical_rates(&p, 0.0, class).unwrap();
        let cfg = polar_study(p, system_data(ProfileKind::Gaussian), 0.0, class);
        let sol = norm_series(&cfg, NormTarget::Solution).unwrap();
        let gap = norm_series(&cfg, NormTarget::DiffusionGap).unwrap();
        let sol_slope = fit_decay(&sol, window).unwrap().slope;
        let gap_slope = fit_decay(&gap, window).unwrap().slope;
        let diff = gap_slope - sol_slope;
        if diff > -q + 0.15 {
            passed = false;
        }
        details.push(format!(
            "({},{}): gap-sol {diff:.3} vs -q+0.15 = {:.3}",
            p.rho,
            p.theta,
            -q + 0.15
        ));
    }
    // threshold algebra on a 20x20 lattice of (rho, theta)
    let mut algebra_ok = true;
    for i in 0..20 {
        let rho = 0.5 * (i as f64 + 0.5) / 20.0;
        let q_limit = refinement_q(rho, 1.0 - rho);
        // continuity: both branches agree on the threshold line
        let below_branch = (2.0 * (1.0 - rho) - 1.0) / (2.0 - 2.0 * rho);
        if (q_limit - below_branch).abs() > 1e-12 {
            algebra_ok = false;
        }
        for j in 0..20 {
            let theta = (1.0 - rho) + (1.0 - (1.0 - rho)) * (j as f64 + 1.0) / 20.0;
            if refinement_q(rho, theta) != q_limit {
                algebra_ok = false;
            }
        }
    }
    if !algebra_ok {
        passed = false;
        details.push("threshold algebra failed".into());
    }
    CriterionResult::new(8, "diffusion refinement & threshold", passed, details.join("; "))
}

/// Criterion 9: exterior Gevrey indicator — bounded for theta < 1,
/// divergent (with the substitute weight r^{0.1}) for theta = 1.
pub fn criterion_9() -> CriterionResult {
    let samples = log_spaced(10.0, 1e4, 25);
    let p = ModelParams::new(1.0, 2.0, 0.25, 0.75).unwrap();
    let c_prime = 0.5 * exterior_gap_coefficient(&p, &samples);
    let bounded = gevrey_indicator(&p, 1.0, c_prime, &samples);
    let p1 = ModelParams::new(1.0, 2.0, 0.25, 1.0).unwrap();
    let c_prime1 = 0.5 * exterior_gap_coefficient(&p1, &samples);
    // theta = 1: the substitute weight grows without bound in r, so the
    // indicator diverges as t increases; t = 40 suffices to cross 1e3
    let divergent = gevrey_indicator(&p1, 40.0, c_prime1, &samples);
    let passed = bounded <= 2.0 && divergent > 1e3;
    CriterionResult::new(
        9,
        "exterior Gevrey smoothing",
        passed,
        format!("theta=0.75: {bounded:.3} <= 2; theta=1: {divergent:.3e} > 1e3"),
    )
}

/// Criterion 10: infrastructure invariants (transforms, Parseval,
/// semigroup, change of variables, energy identity, moment lemma).
pub fn criterion_10(seed: u64) -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut details = Vec::new();
    let mut passed = true;

    // transform round trip and Parseval on random fields
    let grid = GridSpec::new(64, 20.0).unwrap();
    let mut max_rt = 0.0f64;
    let mut max_parseval = 0.0f64;
    for _ in 0..20 {
        let mut f = FourierField::zeros(grid, 2);
        for v in &mut f.data {
            *v = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let spec = transform(&f, Direction::Forward).unwrap();
        let back = transform(&spec, Direction::Inverse).unwrap();
        let scale = f.data.iter().map(|z| z.norm()).fold(1e-300, f64::max);
        let rt = f
            .data
            .iter()
            .zip(&back.data)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        max_rt = max_rt.max(rt / scale);
        let (l2_phys, _, _) = crate::grid::physical_norms(&f, 2.0, 1.0);
        let l2_spec = sobolev_norm(&spec, 0.0, None);
        max_parseval = max_parseval.max((l2_phys - l2_spec).abs() / l2_phys);
    }
    if max_rt > 1e-10 || max_parseval > 1e-8 {
        passed = false;
    }
    details.push(format!("round trip {max_rt:.2e}, Parseval {max_parseval:.2e}"));

    // semigroup, u<->W round trip, energy identity
    let p = ModelParams::new(1.0, 2.0, 0.25, 0.75).unwrap();
    let mut max_semi = 0.0f64;
    let mut max_round = 0.0f64;
    let mut max_energy = 0.0f64;
    for _ in 0..100 {
        let r = 10f64.powf(rng.gen_range(-3.0..2.0));
        let (t1, t2) = (rng.gen_range(0.0..20.0), rng.gen_range(0.0..20.0));
        let one = block_propagator(&p, r, t1 + t2).matrix();
        let two = mat4_mul(
            &block_propagator(&p, r, t1).matrix(),
            &block_propagator(&p, r, t2).matrix(),
        );
        max_semi = max_semi.max(mat4_max_abs_diff(&one, &two));

        let xi = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0f64).max(1e-3)];
        let u0 = [c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))];
        let u1 = [c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))];
        let w: Vec4 = u_to_w(&u0, &u1, xi, &p);
        let (u0b, u1b) = w_to_u(&w, xi, &p).unwrap();
        for i in 0..2 {
            max_round = max_round.max((u0[i] - u0b[i]).norm().max((u1[i] - u1b[i]).norm()));
        }
        let r2 = xi[0] * xi[0] + xi[1] * xi[1];
        let dot = xi[0] * u0[0] + xi[1] * u0[1];
        let expect = 2.0 * (u1[0].norm_sqr() + u1[1].norm_sqr())
            + 2.0 * p.a * p.a * r2 * (u0[0].norm_sqr() + u0[1].norm_sqr())
            + 2.0 * (p.b * p.b - p.a * p.a) * dot.norm_sqr();
        max_energy = max_energy.max((vec4_norm_sq(&w) - expect).abs() / expect.max(1e-12));
    }
    if max_semi > 1e-9 || max_round > 1e-12 || max_energy > 1e-12 {
        passed = false;
    }
    details.push(format!(
        "semigroup {max_semi:.2e}, u<->W {max_round:.2e}, energy {max_energy:.2e}"
    ));

    // moment lemma for every generated data kind
    let grid = GridSpec::new(256, 40.0).unwrap();
    for kind in [ProfileKind::Gaussian, ProfileKind::GaussianDerivative, ProfileKind::Ring] {
        let spec = InitialDataSpec {
            kind,
            width: if kind == ProfileKind::Ring { 0.5 } else { 1.0 },
            amplitude: 1.0,
            target: DataTarget::U1,
        };
        let (_, u1) = make_initial_data(&spec, grid).unwrap();
        let (_, holds) = moment_bound_check(&u1, 1.0).unwrap();
        if !holds {
            passed = false;
            details.push(format!("moment lemma failed for {kind:?}"));
        }
    }

    CriterionResult::new(10, "infrastructure invariants", passed, details.join("; "))
}

/// Runs all ten criteria in order.
pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    vec![
        criterion_1(seed),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(seed),
    ]
}
