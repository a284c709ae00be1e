//! Experiment configuration, trial scheduling and file output.
//!
//! A run reads a strict JSON config, executes its trials on a worker pool
//! (trial `i` always draws from stream `i` of the seed, and results are
//! collected in trial order), writes every output into a temporary directory
//! and renames it into place together with a `manifest.json` that lists a
//! SHA-256 for each file.

mod runners;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::lattice::TopologyKind;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Simulate,
    RingExact,
    InvarianceCheck,
    LimitTable,
    CriticalAbsorption,
    FreezingScan,
    SubcriticalCompare,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Simulate,
        ExperimentKind::RingExact,
        ExperimentKind::InvarianceCheck,
        ExperimentKind::LimitTable,
        ExperimentKind::CriticalAbsorption,
        ExperimentKind::FreezingScan,
        ExperimentKind::SubcriticalCompare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::RingExact => "ring-exact",
            ExperimentKind::InvarianceCheck => "invariance-check",
            ExperimentKind::LimitTable => "limit-table",
            ExperimentKind::CriticalAbsorption => "critical-absorption",
            ExperimentKind::FreezingScan => "freezing-scan",
            ExperimentKind::SubcriticalCompare => "subcritical-compare",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub topology: TopologyKind,
    #[serde(rename = "L")]
    pub len: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    /// Explicit initial configuration in text form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_events: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_stride: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Write configuration snapshots where the experiment supports them.
    #[serde(default)]
    pub snapshots: bool,
}

/// Experiment-specific knobs; every field has a default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    /// Densities to sweep (invariance-check, limit-table).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhos: Option<Vec<f64>>,
    /// Longest cylinder support (invariance-check), default 5.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_max: Option<usize>,
    /// Largest `k` of the forbidden patterns `11(01)^k00`, default 4.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    /// Table word length (limit-table), default 10.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    /// Longest compared word (subcritical-compare), default 3.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern_max: Option<usize>,
    /// Sampling grid spacing (critical-absorption), default 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
    /// Freezing windows (freezing-scan).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_half_width: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_zone: Option<f64>,
    /// Height checkpoints (freezing-scan); the probe runs only if given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_left: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_right: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub lattice: LatticeConfig,
    #[serde(default)]
    pub dynamics: DynamicsConfig,
    #[serde(default = "one")]
    pub trials: u64,
    pub seed: u64,
    pub output: OutputConfig,
    #[serde(default)]
    pub params: ParamsConfig,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Run(String),
}

impl ExperimentError {
    pub fn exit_code(&self) -> i32 {
        EXIT_CONFIG
    }

    fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> ExperimentError {
        let context = context.into();
        move |source| ExperimentError::Io { context, source }
    }
}

/// A parsed config together with its source text, for line-numbered errors.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    text: String,
}

impl LoadedConfig {
    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| ExperimentError::Config {
                line: e.line().max(1),
                message: e.to_string(),
            })?;
        Ok(LoadedConfig {
            config,
            text: text.to_string(),
        })
    }

    pub fn from_path(path: &Path) -> Result<Self, ExperimentError> {
        let text = fs::read_to_string(path)
            .map_err(ExperimentError::io(format!("reading {}", path.display())))?;
        LoadedConfig::parse(&text)
    }

    pub fn from_config(config: ExperimentConfig) -> Self {
        let text = serde_json::to_string_pretty(&config).expect("config serializes");
        LoadedConfig { config, text }
    }

    /// Error pointing at the first line that mentions `key`.
    pub(crate) fn error(&self, key: &str, message: impl Into<String>) -> ExperimentError {
        let needle = format!("\"{key}\"");
        let line = self
            .text
            .lines()
            .position(|l| l.contains(&needle))
            .map_or(1, |i| i + 1);
        ExperimentError::Config {
            line,
            message: format!("`{key}`: {}", message.into()),
        }
    }
}

/// Point estimate and Wilson 95% interval of a proportion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimatorResult {
    pub estimate: f64,
    pub low: f64,
    pub high: f64,
    pub trials: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    /// `(estimate - target) / sqrt(target (1 - target) / trials)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
}

impl EstimatorResult {
    pub fn with_target(mut self, target: f64) -> Self {
        let sd = (target * (1.0 - target) / self.trials as f64).sqrt();
        self.target = Some(target);
        self.z = Some(if sd > 0.0 {
            (self.estimate - target) / sd
        } else {
            0.0
        });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("proportion needs 0 <= successes <= trials and trials > 0")]
pub struct EstimatorError;

pub fn estimate_proportion(successes: u64, trials: u64) -> Result<EstimatorResult, EstimatorError> {
    if trials == 0 || successes > trials {
        return Err(EstimatorError);
    }
    let (low, high) = crate::limits::wilson(successes as f64, trials as f64);
    let estimate = successes as f64 / trials as f64;
    Ok(EstimatorResult {
        estimate,
        low: low.min(estimate),
        high: high.max(estimate),
        trials,
        target: None,
        z: None,
    })
}

/// Outcome of one exact numerical check.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Files and checks produced by one experiment, before they hit the disk.
#[derive(Debug, Clone, Default)]
pub struct ExperimentOutput {
    pub files: Vec<(String, String)>,
    pub checks: Vec<Check>,
}

impl ExperimentOutput {
    pub(crate) fn file(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    pub(crate) fn json(&mut self, name: &str, value: &impl Serialize) {
        let mut s = serde_json::to_string_pretty(value).expect("serializable");
        s.push('\n');
        self.file(name, s);
    }

    pub(crate) fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, passed, detail));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; zero picks the available parallelism.
    pub workers: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { workers: 1 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub experiment: ExperimentKind,
    pub config: ExperimentConfig,
    pub versions: Versions,
    pub seed: u64,
    pub workers: usize,
    /// Stream id of trial `i` is `stream_ids[i]`.
    pub stream_ids: Vec<u64>,
    pub wall_time_seconds: f64,
    pub checks: Vec<Check>,
    pub exit_code: i32,
    pub files: Vec<FileEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    pub ftasep: &'static str,
    pub rng: &'static str,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub out_dir: PathBuf,
    pub manifest: Manifest,
}

/// Validates the config, runs the experiment and writes its outputs.
pub fn run(loaded: &LoadedConfig, options: RunOptions) -> Result<RunOutcome, ExperimentError> {
    let started = Instant::now();
    let config = &loaded.config;
    runners::validate(loaded)?;
    let workers = match options.workers {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        w => w,
    };
    let output = runners::execute(loaded, workers)?;
    let exit_code = if output.checks.iter().all(|c| c.passed) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    };
    let files = output
        .files
        .iter()
        .map(|(name, contents)| FileEntry {
            name: name.clone(),
            sha256: hex_digest(contents.as_bytes()),
            bytes: contents.len(),
        })
        .collect();
    let manifest = Manifest {
        experiment: config.experiment,
        config: config.clone(),
        versions: Versions {
            ftasep: env!("CARGO_PKG_VERSION"),
            rng: "chacha8 keyed by (seed, stream, lane)",
        },
        seed: config.seed,
        workers,
        stream_ids: runners::stream_ids(config),
        wall_time_seconds: started.elapsed().as_secs_f64(),
        checks: output.checks.clone(),
        exit_code,
        files,
    };
    write_outputs(&config.output.dir, &output, &manifest)?;
    Ok(RunOutcome {
        exit_code,
        out_dir: config.output.dir.clone(),
        manifest,
    })
}

fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        let _ = write!(s, "{b:02x}");
    }
    s
}

/// Writes into a sibling temporary directory, then renames it over `dir`.
/// An existing `dir` is replaced only if it holds a previous run's manifest.
fn write_outputs(
    dir: &Path,
    output: &ExperimentOutput,
    manifest: &Manifest,
) -> Result<(), ExperimentError> {
    let parent = match dir.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&parent).map_err(ExperimentError::io(format!(
        "creating {}",
        parent.display()
    )))?;
    if dir.exists() && !dir.join("manifest.json").is_file() {
        let is_empty_dir = fs::read_dir(dir)
            .map(|mut d| d.next().is_none())
            .unwrap_or(false);
        if !is_empty_dir {
            return Err(ExperimentError::Run(format!(
                "output directory {} exists and is not a previous run; refusing to replace it",
                dir.display()
            )));
        }
    }
    let base = dir
        .file_name()
        .map_or("out".into(), |n| n.to_string_lossy().into_owned());
    let tmp = parent.join(format!(".{base}.tmp-{}", std::process::id()));
    let write_all = || -> std::io::Result<()> {
        if tmp.exists() {
            fs::remove_dir_all(&tmp)?;
        }
        fs::create_dir(&tmp)?;
        for (name, contents) in &output.files {
            fs::write(tmp.join(name), contents)?;
        }
        let mut m = serde_json::to_string_pretty(manifest).expect("serializable");
        m.push('\n');
        fs::write(tmp.join("manifest.json"), m)?;
        if dir.exists() {
            fs::remove_dir_all(dir)?;
        }
        fs::rename(&tmp, dir)
    };
    write_all().map_err(|e| {
        let _ = fs::remove_dir_all(&tmp);
        ExperimentError::Io {
            context: format!("writing {}", dir.display()),
            source: e,
        }
    })
}

/// Runs `f` over trial indices `0..n` on `workers` threads, in index order.
pub fn map_trials<T, F>(n: u64, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    if workers <= 1 {
        return (0..n).map(f).collect();
    }
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    pool.install(|| (0..n).into_par_iter().map(f).collect())
}
