use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use kp_cli::config::{read_config_file, ExperimentConfig};
use kp_cli::{exit, presets, run_experiment, validate, RunError};

#[derive(Parser)]
#[command(
    name = "kpsim",
    version,
    about = "Spectral KP solver with cnoidal-wave initial data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write snapshots, diagnostics and a manifest.
    Run(RunArgs),
    /// Propagate the unperturbed cnoidal wave and check the accuracy.
    Validate(RunArgs),
    /// List the named experiments.
    Presets {
        /// Emit the table as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Default)]
struct RunArgs {
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    #[arg(long, value_name = "kp1|kp2")]
    equation: Option<String>,
    #[arg(long, value_name = "F")]
    kappa: Option<String>,
    #[arg(long, value_name = "F")]
    k: Option<String>,
    #[arg(long, value_name = "F")]
    u0: Option<String>,
    #[arg(long, value_name = "F")]
    x0: Option<String>,
    #[arg(long, value_name = "F", conflicts_with = "gauss_scale")]
    delta: Option<String>,
    #[arg(long, value_name = "F")]
    gauss_scale: Option<String>,
    #[arg(long, value_name = "F")]
    t_end: Option<String>,
    #[arg(long, value_name = "N")]
    nt: Option<String>,
    #[arg(long, value_name = "N")]
    nx: Option<String>,
    #[arg(long, value_name = "N")]
    ny: Option<String>,
    #[arg(long, value_name = "N")]
    periods: Option<String>,
    #[arg(long, value_name = "F")]
    ly: Option<String>,
    #[arg(long, value_name = "DIR")]
    out: Option<String>,
    #[arg(long, value_name = "t1,t2,...")]
    snapshots: Option<String>,
    /// Diagnostics cadence in steps.
    #[arg(long, value_name = "N")]
    diag_every: Option<String>,
    #[arg(long)]
    dealias: bool,
    #[arg(long, value_name = "N")]
    threads: Option<String>,
}

impl RunArgs {
    fn overrides(&self) -> Vec<(String, String)> {
        let pairs = [
            ("preset", &self.preset),
            ("equation", &self.equation),
            ("kappa", &self.kappa),
            ("k", &self.k),
            ("u0", &self.u0),
            ("x0", &self.x0),
            ("delta", &self.delta),
            ("gauss-scale", &self.gauss_scale),
            ("t-end", &self.t_end),
            ("nt", &self.nt),
            ("nx", &self.nx),
            ("ny", &self.ny),
            ("periods", &self.periods),
            ("ly", &self.ly),
            ("out", &self.out),
            ("snapshots", &self.snapshots),
            ("diag-every", &self.diag_every),
            ("threads", &self.threads),
        ];
        let mut out: Vec<(String, String)> = pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect();
        if self.dealias {
            out.push(("dealias".into(), "true".into()));
        }
        out
    }

    /// Defaults, then the config file, then flags.
    fn resolve(&self) -> Result<ExperimentConfig, RunError> {
        let mut cfg = ExperimentConfig::default();
        let mut settings = match &self.config {
            Some(p) => read_config_file(p)?,
            None => Vec::new(),
        };
        let flags = self.overrides();
        // A preset flag replaces the file's preset but not its other keys.
        if flags.iter().any(|(k, _)| k == "preset") {
            settings.retain(|(k, _)| k != "preset");
        }
        if let Some((_, name)) = flags.iter().find(|(k, _)| k == "preset") {
            cfg.set("preset", name)?;
        }
        cfg.apply_all(&settings)?;
        for (k, v) in flags.iter().filter(|(k, _)| k != "preset") {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }
}

fn init_threads(cfg: &ExperimentConfig) -> anyhow::Result<()> {
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

fn fail(e: &RunError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Presets { json } => {
            if json {
                println!("{}", presets::table_json());
            } else {
                print!("{}", presets::table());
            }
            ExitCode::SUCCESS
        }
        Command::Run(args) => {
            let cfg = match args.resolve() {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            if let Err(e) = init_threads(&cfg) {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
            match run_experiment(&cfg) {
                Ok(summary) => {
                    let last = summary.records.last().expect("final record");
                    println!(
                        "completed: t = {}, delta = {:.3e}, {} snapshots in {}",
                        last.t,
                        last.delta,
                        summary.snapshot_paths.len(),
                        cfg.output_dir.display()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Validate(args) => {
            let cfg = match args.resolve() {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            if let Err(e) = init_threads(&cfg) {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
            match validate(&cfg) {
                Ok(report) => {
                    print!("{}", report.render());
                    if report.passed {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(exit::VALIDATION as u8)
                    }
                }
                Err(e) => fail(&e),
            }
        }
    }
}
