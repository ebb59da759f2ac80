use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use effthermo::app::{self, RunOptions};
use effthermo::ledger::Format;

#[derive(Parser)]
#[command(name = "effthermo", version, about = "Effective-temperature thermodynamics of coupled quantum systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate a scenario, write its ledger and audit summary.
    Run(Common),
    /// Run a scenario once per value of its [sweep] parameter.
    Sweep(Common),
    /// List the built-in presets, or print one as a config.
    Presets {
        #[arg(long, value_name = "NAME")]
        show: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Parse and build a scenario without running it.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// Config file path or preset name.
    scenario: String,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Seed for random presets.
    #[arg(long)]
    seed: Option<u64>,
    /// Concurrent sweep entries (default: number of CPUs).
    #[arg(long)]
    workers: Option<usize>,
    /// Residual allowed on identities (default 1e-8)
    #[arg(long)]
    tol_identity: Option<f64>,
    /// Slack allowed on inequalities (default 1e-10)
    #[arg(long)]
    tol_inequality: Option<f64>,
}

impl Common {
    fn options(&self) -> RunOptions {
        RunOptions {
            out: self.out.clone(),
            format: self.format,
            seed: self.seed,
            workers: self.workers,
            tol_identity: self.tol_identity,
            tol_inequality: self.tol_inequality,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let mut stdout = std::io::stdout().lock();
    let result = match &cli.command {
        Command::Run(c) => app::run(&c.scenario, &c.options(), &mut stdout),
        Command::Sweep(c) => app::sweep(&c.scenario, &c.options(), &mut stdout),
        Command::Presets { show, seed } => app::presets(show.as_deref(), *seed, &mut stdout),
        Command::Validate(c) => app::validate(&c.scenario, &c.options(), &mut stdout),
    };
    match result {
        Ok(outcome) => {
            if let Some(f) = &outcome.failure {
                eprintln!("{f}");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
