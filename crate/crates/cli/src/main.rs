//! Command-line front end: every experiment in the study is a subcommand
//! driven by one JSON configuration, writing deterministic CSV/JSON (and
//! optionally SVG) artifacts. Exit codes: 0 on success, 1 on configuration
//! or runtime errors, 2 when an acceptance check fails.

mod config;
mod output;

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use elastowave::acceptance::run_all;
use elastowave::analysis::{
    certificate_exponent, exterior_gap_coefficient, gevrey_indicator, log_spaced, norm_series,
    remainder_certificate, residual_order_fit, theoretical_rates, NormTarget, StudyConfig,
};
use elastowave::data::make_w0;
use elastowave::fitting::fit_decay;
use elastowave::grid::{sobolev_norm, write_binary};
use elastowave::propagator::{block_propagator, evolve};
use elastowave::symbol::{exact_eigenvalues, FrequencyRegime};
use elastowave::zones::{imaginary_root_certificate, pointwise_constants_fit, spectral_gap_scan};
use elastowave::{Error, ModelParams};

use config::{ExperimentConfig, Overrides};
use output::{ensure_dir, write_json, write_loglog_svg, write_table};

#[derive(Parser)]
#[command(name = "elastowave", version, about = "Dissipative elastic wave studies")]
struct Cli {
    /// JSON experiment configuration; defaults are used when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the slower wave speed.
    #[arg(long, global = true)]
    a: Option<f64>,
    /// Override the faster wave speed.
    #[arg(long, global = true)]
    b: Option<f64>,
    /// Override the lower dissipation exponent.
    #[arg(long, global = true)]
    rho: Option<f64>,
    /// Override the higher dissipation exponent.
    #[arg(long, global = true)]
    theta: Option<f64>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cap the rayon worker pool.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override the RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact vs principal eigenvalues over the small and large bands.
    EigSweep,
    /// Spectral-gap scan of the bounded zone.
    StabilityScan {
        /// Log-spaced sample count for the certified scan.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Largest feasible pointwise envelope rate c with its constant C.
    PointwiseFit,
    /// Evolve lattice initial data and write snapshots.
    Simulate,
    /// Sobolev-norm decay series with fitted vs theoretical exponents.
    DecayStudy,
    /// Solution vs diffusion-gap decay and the refinement exponent.
    DiffusionStudy,
    /// Exterior smoothing indicator (Gevrey gain, lost at theta = 1).
    GevreyCheck,
    /// Run the full acceptance suite.
    VerifyAll,
}

enum Failure {
    /// Configuration, I/O, or runtime errors: exit 1.
    Run(String),
    /// A named acceptance-style check failed: exit 2.
    Acceptance(String),
}

impl From<String> for Failure {
    fn from(msg: String) -> Self {
        Failure::Run(msg)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::GapViolation { .. } | Error::PointwiseInfeasible { .. } => {
                Failure::Acceptance(e.to_string())
            }
            other => Failure::Run(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Acceptance(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| format!("cannot configure thread pool: {e}"))?;
    }
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::defaults(
            ModelParams::new(1.0, 2.0, 0.25, 0.75).expect("default parameters are valid"),
        ),
    };
    let ov = Overrides { a: cli.a, b: cli.b, rho: cli.rho, theta: cli.theta, out: cli.out };
    cfg.apply(&ov)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let dir = cfg.out_dir();
    ensure_dir(&dir)?;

    match cli.cmd {
        Cmd::EigSweep => eig_sweep(&cfg, &dir),
        Cmd::StabilityScan { samples } => stability_scan(&cfg, &dir, samples),
        Cmd::PointwiseFit => pointwise_fit(&cfg, &dir),
        Cmd::Simulate => simulate(&cfg, &dir),
        Cmd::DecayStudy => decay_study(&cfg, &dir),
        Cmd::DiffusionStudy => diffusion_study(&cfg, &dir),
        Cmd::GevreyCheck => gevrey_check(&cfg, &dir),
        Cmd::VerifyAll => verify_all(&cfg, &dir),
    }
}

fn eig_sweep(cfg: &ExperimentConfig, dir: &std::path::Path) -> Result<(), Failure> {
    let p = &cfg.params;
    let mut summary = serde_json::Map::new();
    for (regime, label, band) in [
        (FrequencyRegime::Small, "small", (1e-4, 1e-2)),
        (FrequencyRegime::Large, "large", (1e2, 1e4)),
    ] {
        let radii = log_spaced(band.0, band.1, 40);
        let mut rows = Vec::with_capacity(radii.len());
        for &r in &radii {
            let eig = exact_eigenvalues(p, r);
            let pr = elastowave::symbol::principal_eigenvalues(p, r, regime);
            let mut row = vec![r];
            for j in 0..4 {
                row.push(eig.lambda[j].re);
                row.push(eig.lambda[j].im);
                row.push((eig.lambda[j] - pr.lambda[j]).norm());
            }
            rows.push(row);
        }
        let header = [
            "r", "re1", "im1", "res1", "re2", "im2", "res2", "re3", "im3", "res3", "re4", "im4",
            "res4",
        ];
        if cfg.wants(config::OutputFormat::Csv) {
            write_table(dir, &format!("eig_sweep_{label}"), &header, &rows)?;
        }
        let fits = residual_order_fit(p, regime, band, 40)?;
        let cert = remainder_certificate(p, regime, band, 40);
        summary.insert(
            label.to_string(),
            json!({
                "band": band,
                "predicted_exponent": elastowave::symbol::predicted_remainder_exponent(p, regime),
                "certificate_exponent": certificate_exponent(p, regime),
                "branch_fits": fits,
                "certificate_constants": cert,
            }),
        );
    }
    if cfg.wants(config::OutputFormat::Json) {
        write_json(dir, "eig_sweep", cfg, summary)?;
    }
    println!("eig-sweep: wrote reports to {}", dir.display());
    Ok(())
}

fn stability_scan(
    cfg: &ExperimentConfig,
    dir: &std::path::Path,
    samples: usize,
) -> Result<(), Failure> {
    let cert = spectral_gap_scan(&cfg.params, &cfg.zone, samples)?;
    if cfg.wants(config::OutputFormat::Csv) {
        let rows: Vec<Vec<f64>> = log_spaced(cfg.zone.eps, cfg.zone.big_n, 200)
            .into_iter()
            .map(|r| {
                let min_re = exact_eigenvalues(&cfg.params, r)
                    .lambda
                    .iter()
                    .map(|l| l.re)
                    .fold(f64::INFINITY, f64::min);
                vec![r, min_re, imaginary_root_certificate(&cfg.params, r)]
            })
            .collect();
        write_table(dir, "stability_scan", &["r", "min_re_lambda", "imaginary_margin"], &rows)?;
    }
    if cfg.wants(config::OutputFormat::Json) {
        write_json(dir, "stability_scan", cfg, &cert)?;
    }
    println!(
        "stability-scan: gap {:.6} at r = {:.4} over {} samples (margin {:.4})",
        cert.min_real_part, cert.argmin_r, cert.samples, cert.identity_margin
    );
    Ok(())
}

fn pointwise_fit(cfg: &ExperimentConfig, dir: &std::path::Path) -> Result<(), Failure> {
    let r_samples = log_spaced(1e-3, 1e3, 31);
    let t_samples = [0.0, 1.0, 10.0, 100.0];
    let (c_big, c_rate) = pointwise_constants_fit(&cfg.params, &r_samples, &t_samples)?;
    if cfg.wants(config::OutputFormat::Csv) {
        let mut rows = Vec::new();
        for &r in &r_samples {
            for &t in &t_samples {
                rows.push(vec![r, t, block_propagator(&cfg.params, r, t).opnorm()]);
            }
        }
        write_table(dir, "pointwise_fit", &["r", "t", "opnorm"], &rows)?;
    }
    if cfg.wants(config::OutputFormat::Json) {
        write_json(
            dir,
            "pointwise_fit",
            cfg,
            json!({
                "c_big": c_big,
                "c_rate": c_rate,
                "r_range": [r_samples[0], r_samples[r_samples.len() - 1]],
                "t_samples": t_samples,
            }),
        )?;
    }
    println!("pointwise-fit: C = {c_big:.4}, c = {c_rate:.6}");
    Ok(())
}

fn simulate(cfg: &ExperimentConfig, dir: &std::path::Path) -> Result<(), Failure> {
    let grid = cfg.grid_spec();
    let w0 = make_w0(&cfg.data, grid, &cfg.params)?;
    let times = cfg.times();
    let snapshots = evolve(&cfg.params, &w0, &times)?;
    let mut rows = vec![vec![0.0, sobolev_norm(&w0, cfg.study.s, None)]];
    for (i, (t, snap)) in times.iter().zip(&snapshots).enumerate() {
        let path = dir.join(format!("snapshot_{i:03}.bin"));
        let file = File::create(&path)
            .map_err(|e| format!("cannot create {}: {e}", path.display()))?;
        write_binary(snap, &mut BufWriter::new(file))?;
        rows.push(vec![*t, sobolev_norm(snap, cfg.study.s, None)]);
    }
    if cfg.wants(config::OutputFormat::Csv) {
        write_table(dir, "simulate_norms", &["t", "norm"], &rows)?;
    }
    if cfg.wants(config::OutputFormat::Json) {
        write_json(
            dir,
            "simulate",
            cfg,
            json!({ "times": times, "snapshots": snapshots.len(), "s": cfg.study.s }),
        )?;
    }
    println!("simulate: wrote {} snapshots to {}", snapshots.len(), dir.display());
    Ok(())
}

fn study_config(cfg: &ExperimentConfig) -> StudyConfig {
    StudyConfig {
        params: cfg.params,
        data: cfg.data.clone(),
        s: cfg.study.s,
        class: cfg.study.class,
        pipeline: cfg.study.pipeline,
        times: cfg.times(),
        zone: cfg.zone.clone(),
        grid: Some(cfg.grid_spec()),
    }
}

fn decay_study(cfg: &ExperimentConfig, dir: &std::path::Path) -> Result<(), Failure> {
    let study = study_config(cfg);
    let series = norm_series(&study, NormTarget::Solution)?;
    let fit = fit_decay(&series, cfg.study.window)?;
    let (base, q) = theoretical_rates(&cfg.params, cfg.study.s, cfg.study.class)?;
    if cfg.wants(config::OutputFormat::Csv) {
        let rows: Vec<Vec<f64>> = series.iter().map(|&(t, n)| vec![t, n]).collect();
        write_table(dir, "decay_study", &["t", "norm"], &rows)?;
    }
    if cfg.wants(config::OutputFormat::Json) {
        write_json(
            dir,
            "decay_study",
            cfg,
            json!({ "fit": fit, "theoretical_base_rate": base, "refinement_q": q }),
        )?;
    }
    if cfg.wants(config::OutputFormat::Svg) {
        write_loglog_svg(dir, "decay_study", "solution norm decay", &[("solution", &series)])?;
    }
    println!(
        "decay-study: fitted slope {:.4} +/- {:.4} (theoretical base rate -{:.4})",
        fit.slope, fit.stderr, base
    );
    Ok(())
}

fn diffusion_study(cfg: &ExperimentConfig, dir: &std::path::Path) -> Result<(), Failure> {
    let study = study_config(cfg);
    let solution = norm_series(&study, NormTarget::Solution)?;
    let gap = norm_series(&study, NormTarget::DiffusionGap)?;
    let sol_fit = fit_decay(&solution, cfg.study.window)?;
    let gap_fit = fit_decay(&gap, cfg.study.window)?;
    let (_, q) = theoretical_rates(&cfg.params, cfg.study.s, cfg.study.class)?;
    let improvement = gap_fit.slope - sol_fit.slope;
    let refined = improvement <= -q + 0.15;
    if cfg.wants(config::OutputFormat::Csv) {
        let rows: Vec<Vec<f64>> = solution
            .iter()
            .zip(&gap)
            .map(|(&(t, s), &(_, g))| vec![t, s, g])
            .collect();
        write_table(dir, "diffusion_study", &["t", "solution", "gap"], &rows)?;
    }
    if cfg.wants(config::OutputFormat::Json) {
        write_json(
            dir,
            "diffusion_study",
            cfg,
            json!({
                "solution_fit": sol_fit,
                "gap_fit": gap_fit,
                "refinement_q": q,
                "observed_improvement": improvement,
                "refined": refined,
            }),
        )?;
    }
    if cfg.wants(config::OutputFormat::Svg) {
        write_loglog_svg(
            dir,
            "diffusion_study",
            "solution vs diffusion gap",
            &[("solution", &solution), ("gap", &gap)],
        )?;
    }
    println!(
        "diffusion-study: solution slope {:.4}, gap slope {:.4}, q = {:.4} ({})",
        sol_fit.slope,
        gap_fit.slope,
        q,
        if refined { "refined" } else { "not refined" }
    );
    if !refined {
        return Err(Failure::Acceptance(format!(
            "diffusion gap improvement {improvement:.4} misses the refinement exponent -{q:.4}"
        )));
    }
    Ok(())
}

fn gevrey_check(cfg: &ExperimentConfig, dir: &std::path::Path) -> Result<(), Failure> {
    let p = &cfg.params;
    let samples = log_spaced(cfg.zone.big_n, 1e4, 25);
    let c_prime = 0.5 * exterior_gap_coefficient(p, &samples);
    let degenerate = (p.theta - 1.0).abs() < 1e-12;
    let t = if degenerate { 40.0 } else { 1.0 };
    let indicator = gevrey_indicator(p, t, c_prime, &samples);
    // with a genuine Gevrey gain the weighted supremum stays O(1); at the
    // degenerate endpoint it blows up with t
    let gain = !degenerate && indicator <= 2.0;
    if cfg.wants(config::OutputFormat::Json) {
        write_json(
            dir,
            "gevrey_check",
            cfg,
            json!({
                "t": t,
                "c_prime": c_prime,
                "indicator": indicator,
                "degenerate_endpoint": degenerate,
                "gevrey_gain": gain,
            }),
        )?;
    }
    println!(
        "gevrey-check: indicator {indicator:.4e} at t = {t} ({})",
        if gain { "exterior Gevrey gain" } else { "no Gevrey gain" }
    );
    Ok(())
}

fn verify_all(cfg: &ExperimentConfig, dir: &std::path::Path) -> Result<(), Failure> {
    let results = run_all(cfg.seed);
    for r in &results {
        println!(
            "criterion {:2} [{}] {} — {}",
            r.id,
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        );
    }
    if cfg.wants(config::OutputFormat::Json) {
        write_json(dir, "verify_all", cfg, &results)?;
    }
    if let Some(failed) = results.iter().find(|r| !r.passed) {
        return Err(Failure::Acceptance(format!(
            "criterion {} ({}) failed: {}",
            failed.id, failed.name, failed.detail
        )));
    }
    println!("verify-all: all {} criteria passed", results.len());
    Ok(())
}
