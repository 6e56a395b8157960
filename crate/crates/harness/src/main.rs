use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use vx_harness::{emit_plotdata, load_config, run_study, HarnessError, RunOptions, StudyKind};

#[derive(Parser)]
#[command(name = "vortexlab", version, about = "Run vortex-system studies and write their artifacts")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// output directory; overrides `out` in the config
    #[arg(long)]
    out: Option<PathBuf>,
    /// worker threads, 0 for all cores
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// overwrite an existing study directory
    #[arg(long)]
    force: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// particle ensembles with conserved-quantity diagnostics
    Simulate(Common),
    /// Lamb-Oseen oracle run of the spectral solver
    SolvePde(Common),
    /// particle systems against the limit PDE
    Compare(Common),
    /// ODE hierarchy envelope certificate
    Hierarchy(Common),
    /// envelope, decay and log-growth checks
    Regularity(Common),
    /// exponential-moment probes
    Concentration(Common),
    /// charts from a finished study directory
    Plot {
        #[arg(long)]
        dir: PathBuf,
    },
}

fn run(cmd: Cmd) -> Result<i32, HarnessError> {
    let (c, kind) = match cmd {
        Cmd::Plot { dir } => {
            for name in emit_plotdata(&dir)? {
                println!("wrote {}", dir.join(name).display());
            }
            return Ok(0);
        }
        Cmd::Simulate(c) => (c, StudyKind::Simulate),
        Cmd::SolvePde(c) => (c, StudyKind::LambOseen),
        Cmd::Compare(c) => (c, StudyKind::Convergence),
        Cmd::Hierarchy(c) => (c, StudyKind::HierarchyCert),
        Cmd::Regularity(c) => (c, StudyKind::Regularity),
        Cmd::Concentration(c) => (c, StudyKind::Concentration),
    };
    let cfg = load_config(&c.config)?;
    if cfg.study != kind {
        return Err(HarnessError::Usage(format!(
            "config declares study {:?} but the subcommand runs {:?}",
            cfg.study.name(),
            kind.name()
        )));
    }
    let s = run_study(&cfg, &RunOptions { out: c.out, threads: c.threads, seed: c.seed, force: c.force })?;
    println!("{}", s.verdict);
    println!("artifacts in {}", s.dir.display());
    Ok(s.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
