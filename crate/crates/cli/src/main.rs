//! Command-line front end: `simulate`, `criterion`, `oscillation`,
//! `constants`, `verify`.
//!
//! Exit codes: 0 completed, 1 configuration or input error, 2 solver error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use axilab::dynamics::SolverError;
use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "axilab", version, about = "Axisymmetric Navier-Stokes laboratory")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root for relative output directories.
    #[arg(long, global = true, env = "AXILAB_OUT", default_value = ".")]
    out_root: PathBuf,
    /// Output directory (overrides `out_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    scenario: Option<String>,
    #[arg(long, global = true)]
    n_rho: Option<usize>,
    #[arg(long, global = true)]
    n_z: Option<usize>,
    #[arg(long, global = true)]
    rho_max: Option<f64>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    t_end: Option<f64>,
    #[arg(long, global = true)]
    stride: Option<usize>,
    #[arg(long, global = true)]
    c_star: Option<f64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario and store its snapshots.
    Simulate,
    /// Evaluate f + M <= g over probes and radii.
    Criterion {
        /// Snapshot directory (default: `<out>/snapshots`).
        #[arg(long)]
        snapshots: Option<PathBuf>,
        /// Extra radii.
        #[arg(long, value_delimiter = ',')]
        radii: Vec<f64>,
    },
    /// Dyadic oscillation scan, decay fit and maximum-principle monitor.
    Oscillation {
        #[arg(long)]
        snapshots: Option<PathBuf>,
    },
    /// Table of the iteration constants over a parameter sweep.
    Constants {
        /// `key=value` overrides of the base parameters.
        #[arg(long = "set")]
        set: Vec<String>,
        /// `key=start:end:count`, linear; repeat for a product sweep.
        #[arg(long = "sweep")]
        sweep: Vec<String>,
    },
    /// Check the growth lemmas on stored swirl snapshots.
    Verify {
        #[arg(long)]
        snapshots: Option<PathBuf>,
        /// Radius R of the check (overrides the config).
        #[arg(long)]
        r: Option<f64>,
    },
}

impl Common {
    fn resolve(&self) -> Result<RunConfig> {
        let mut c = RunConfig::load(self.config.as_deref())?;
        if let Some(name) = &self.scenario {
            c.scenario = serde_json::from_value(serde_json::json!({ "name": name }))
                .map_err(|_| anyhow::anyhow!("unknown scenario {name:?} (zero, rigid_rotation, lamb_oseen)"))?;
        }
        macro_rules! set {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = self.$flag { c.$($field).+ = v; })*
            };
        }
        set!(
            n_rho => grid.n_rho,
            n_z => grid.n_z,
            rho_max => grid.rho_max,
            dt => solver.dt,
            t_end => solver.t_end,
            stride => stride,
            c_star => gauge.c_star,
            alpha => gauge.alpha,
            seed => seed,
        );
        if let Some(o) = &self.out {
            c.out_dir = o.clone();
        }
        c.validate()?;
        Ok(c)
    }

    fn out_dir(&self, c: &RunConfig) -> PathBuf {
        if c.out_dir.is_absolute() {
            c.out_dir.clone()
        } else {
            self.out_root.join(&c.out_dir)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = cli.common.resolve()?;
    let out = cli.common.out_dir(&cfg);
    let snaps = |s: Option<PathBuf>| s.unwrap_or_else(|| out.join("snapshots"));
    match cli.command {
        Command::Simulate => commands::simulate(&cfg, &out),
        Command::Criterion { snapshots, radii } => commands::criterion(&cfg, &out, &snaps(snapshots), &radii),
        Command::Oscillation { snapshots } => commands::oscillation(&cfg, &out, &snaps(snapshots)),
        Command::Constants { set, sweep } => commands::constants(&cfg, &out, &set, &sweep),
        Command::Verify { snapshots, r } => commands::verify(&cfg, &out, &snaps(snapshots), r),
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.chain().any(|c| c.downcast_ref::<SolverError>().is_some()) {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
