//! JSON experiment configuration: one file drives every subcommand, with
//! unknown keys rejected and all nested validations applied on load.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use elastowave::analysis::{log_spaced, DataClass, Pipeline};
use elastowave::data::{DataTarget, InitialDataSpec, ProfileKind};
use elastowave::grid::GridSpec;
use elastowave::params::ModelParams;
use elastowave::zones::ZoneConfig;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
    pub box_length: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { n: 512, box_length: 200.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudySection {
    pub s: f64,
    pub class: DataClass,
    pub pipeline: Pipeline,
    /// Explicit time grid; defaults to 25 log-spaced times over the window.
    pub times: Option<Vec<f64>>,
    pub window: (f64, f64),
}

impl Default for StudySection {
    fn default() -> Self {
        Self {
            s: 0.0,
            class: DataClass::Lebesgue { m: 1.0 },
            pipeline: Pipeline::Polar,
            times: None,
            window: (1e2, 1e4),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: Option<PathBuf>,
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { directory: None, formats: vec![OutputFormat::Csv, OutputFormat::Json] }
    }
}

fn default_data() -> InitialDataSpec {
    InitialDataSpec {
        kind: ProfileKind::Gaussian,
        width: 1.0,
        amplitude: 1.0,
        target: DataTarget::System,
    }
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub params: ModelParams,
    #[serde(default)]
    pub zone: ZoneConfig,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default = "default_data")]
    pub data: InitialDataSpec,
    #[serde(default)]
    pub study: StudySection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

/// Command-line overrides applied on top of the loaded file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub rho: Option<f64>,
    pub theta: Option<f64>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| format!("invalid config {}: {e}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// A full default configuration around the given parameters, used when
    /// no --config file is supplied.
    pub fn defaults(params: ModelParams) -> Self {
        Self {
            params,
            zone: ZoneConfig::default(),
            grid: GridSection::default(),
            data: default_data(),
            study: StudySection::default(),
            output: OutputSection::default(),
            seed: DEFAULT_SEED,
        }
    }

    pub fn apply(&mut self, ov: &Overrides) -> Result<(), String> {
        if ov.a.is_some() || ov.b.is_some() || ov.rho.is_some() || ov.theta.is_some() {
            self.params = ModelParams::new(
                ov.a.unwrap_or(self.params.a),
                ov.b.unwrap_or(self.params.b),
                ov.rho.unwrap_or(self.params.rho),
                ov.theta.unwrap_or(self.params.theta),
            )
            .map_err(|e| e.to_string())?;
        }
        if let Some(out) = &ov.out {
            self.output.directory = Some(out.clone());
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), String> {
        self.zone.validate().map_err(|e| e.to_string())?;
        self.data.validate().map_err(|e| e.to_string())?;
        GridSpec::new(self.grid.n, self.grid.box_length).map_err(|e| e.to_string())?;
        let (lo, hi) = self.study.window;
        if !(lo > 0.0 && hi > lo) {
            return Err(format!("study window must be positive and increasing (got {lo}, {hi})"));
        }
        if let Some(times) = &self.study.times {
            if times.is_empty() || times.windows(2).any(|w| w[1] <= w[0]) {
                return Err("study times must be nonempty and strictly increasing".into());
            }
        }
        if self.study.s < 0.0 {
            return Err(format!("study s must be nonnegative (got {})", self.study.s));
        }
        match self.study.class {
            DataClass::Lebesgue { m } if !(1.0..=2.0).contains(&m) => {
                return Err(format!("class m must lie in [1, 2] (got {m})"));
            }
            DataClass::Weighted { gamma } if !(gamma > 0.0 && gamma <= 1.0) => {
                return Err(format!("class gamma must lie in (0, 1] (got {gamma})"));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec::new(self.grid.n, self.grid.box_length).expect("validated")
    }

    pub fn times(&self) -> Vec<f64> {
        self.study
            .times
            .clone()
            .unwrap_or_else(|| log_spaced(self.study.window.0, self.study.window.1, 25))
    }

    /// Output directory: --out / config / ELASTOWAVE_OUT / "./out".
    pub fn out_dir(&self) -> PathBuf {
        self.output
            .directory
            .clone()
            .or_else(|| std::env::var_os("ELASTOWAVE_OUT").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn wants(&self, fmt: OutputFormat) -> bool {
        self.output.formats.contains(&fmt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg: ExperimentConfig =
            serde_json::from_str(r#"{"params":{"a":1.0,"b":2.0,"rho":0.25,"theta":0.75}}"#)
                .unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.grid.n, 512);
        assert_eq!(cfg.times().len(), 25);
    }

    #[test]
    fn unknown_keys_rejected() {
        let r: Result<ExperimentConfig, _> = serde_json::from_str(
            r#"{"params":{"a":1.0,"b":2.0,"rho":0.25,"theta":0.75},"bogus":1}"#,
        );
        assert!(r.is_err());
    }

    #[test]
    fn invalid_params_rejected_at_parse() {
        let r: Result<ExperimentConfig, _> = serde_json::from_str(
            r#"{"params":{"a":2.0,"b":1.0,"rho":0.25,"theta":0.75}}"#,
        );
        let msg = format!("{}", r.unwrap_err());
        assert!(msg.contains("b must exceed a"), "{msg}");
    }

    #[test]
    fn overrides_revalidate() {
        let mut cfg = ExperimentConfig::defaults(
            ModelParams::new(1.0, 2.0, 0.25, 0.75).unwrap(),
        );
        let ov = Overrides { b: Some(0.5), ..Overrides::default() };
        assert!(cfg.apply(&ov).is_err());
        let ov = Overrides { rho: Some(0.3), theta: Some(0.9), ..Overrides::default() };
        cfg.apply(&ov).unwrap();
        assert_eq!(cfg.params.regime, elastowave::Regime::Above);
    }
}
