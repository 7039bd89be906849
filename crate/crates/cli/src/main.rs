use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lengthpairs::report::{self, Format, RunConfig, RunError, Task};

#[derive(Parser)]
#[command(name = "lengthpairs", version, about = "Length-equivalent curve pairs on hyperbolic surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a run configuration and emit its report.
    Run {
        config: PathBuf,
        /// Override the configured task.
        #[arg(long)]
        task: Option<Task>,
        /// Replace the seed list (repeatable).
        #[arg(long = "seed")]
        seeds: Vec<u64>,
        /// Output path; stdout when neither this nor the config sets one.
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        format: Option<Format>,
    },
}

fn load(path: &PathBuf) -> Result<RunConfig, RunError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
    RunConfig::from_json(&text)
}

fn execute(cli: Cli) -> Result<i32, RunError> {
    report::configure_threads()?;
    let Command::Run { config, task, seeds, out, format } = cli.command;
    let mut cfg = load(&config)?;
    if let Some(t) = task {
        cfg.task = t;
    }
    if !seeds.is_empty() {
        cfg.seeds = seeds;
    }
    if out.is_some() {
        cfg.output_path = out;
    }
    if let Some(f) = format {
        cfg.format = f;
    }
    let rep = report::run(&cfg)?;
    let bytes = report::write_report(&rep, cfg.format, cfg.output_path.as_deref())?;
    if cfg.output_path.is_none() {
        std::io::stdout().write_all(&bytes)?;
    }
    Ok(rep.status.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("lengthpairs: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
