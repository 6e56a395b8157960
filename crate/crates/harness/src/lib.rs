//! Study runner behind the `vortexlab` binary: validated TOML configs, one
//! study per subcommand, artifact directories with a hashed manifest, and
//! SVG charts of the headline curves.

mod artifacts;
mod config;
mod plot;
mod studies;
mod svg;

pub use artifacts::{sha256_hex, ArtifactDir, ArtifactEntry, Manifest, CSV_SCHEMA, FAILED, MANIFEST};
pub use config::*;
pub use plot::{emit_plotdata, PLOT_INPUTS};
pub use studies::*;
pub use svg::{heatmap_svg, line_chart_svg, LineChart, Series};

use std::path::PathBuf;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("missing artifacts in {dir}: expected one of {}", .expected.join(", "))]
    MissingArtifacts { dir: PathBuf, expected: Vec<String> },
    #[error("{study} study failed: {message}")]
    Study { study: &'static str, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// 2 for usage and configuration problems, 3 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Usage(_) | HarnessError::MissingArtifacts { .. } => 2,
            HarnessError::Study { .. } | HarnessError::Io(_) => 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    /// 0 keeps the rayon default
    pub threads: usize,
    pub seed: Option<u64>,
    pub force: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub passed: bool,
    pub verdict: String,
    pub dir: PathBuf,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

/// Runs the configured study into its output directory and writes the
/// manifest. A module error leaves the artifacts written so far, a manifest
/// with status "failed" and a `FAILED` marker.
pub fn run_study(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunSummary, HarnessError> {
    let mut cfg = cfg.clone();
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    if let Some(o) = &opts.out {
        cfg.out = Some(o.clone());
    }
    cfg.validate()?;
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("runs").join(cfg.study.name()));
    let mut art = ArtifactDir::create(&dir, opts.force)?;
    let echo = cfg.to_toml();
    art.write("config.toml", echo.as_bytes())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| HarnessError::Usage(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let result = pool.install(|| studies::dispatch(&cfg, &mut art));
    let threads = pool.current_num_threads();
    let (status, verdict, out) = match result {
        Ok(o) => (if o.passed { "pass" } else { "fail" }, o.verdict.clone(), Ok(o)),
        Err(e) => ("failed", e.to_string(), Err(e)),
    };
    let manifest = Manifest {
        tool: "vortexlab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        csv_schema: CSV_SCHEMA,
        study: cfg.study.name().into(),
        seed: cfg.seed,
        threads,
        config_sha256: sha256_hex(echo.as_bytes()),
        config: echo,
        wall_time_s: start.elapsed().as_secs_f64(),
        status: status.into(),
        verdict,
        artifacts: art.entries().to_vec(),
    };
    art.finish(&manifest)?;
    let o = out?;
    Ok(RunSummary { passed: o.passed, verdict: o.verdict, dir })
}
