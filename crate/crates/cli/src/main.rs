use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use anisolab_cli::config::{Config, Scenario};
use anisolab_cli::error::CliError;
use anisolab_cli::{execute, scenarios};

#[derive(Parser)]
#[command(
    name = "anisolab",
    version,
    about = "Run anisolab verification scenarios from JSON configs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario in a config and write `<name>.csv` and `<name>.meta.json`.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for the sweep.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print the available scenarios.
    ListScenarios,
    /// Parse a config and build its parameters without computing.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into())
}

fn run(
    config: &Path,
    out: Option<PathBuf>,
    seed: Option<u64>,
    threads: Option<usize>,
) -> Result<(), CliError> {
    let mut cfg = Config::load(config)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(k) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::ConfigInvalid(format!("--threads: {e}")))?;
    }
    let report = execute(&cfg)?;
    let dir = out
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let name = cfg.name.clone().unwrap_or_else(|| stem(config));
    let (csv, meta) = report.write(&dir, &name, &cfg)?;
    println!(
        "{}",
        json!({ "csv": csv.display().to_string(), "meta": meta.display().to_string() })
    );
    Ok(())
}

fn validate(config: &Path) -> Result<(), CliError> {
    let cfg = Config::load(config)?;
    scenarios::plan(&cfg)?;
    println!("{}", json!({ "ok": true, "scenario": cfg.scenario.name() }));
    Ok(())
}

fn report_error(e: &CliError) {
    eprintln!("{}", e.record());
    let stderr = std::io::stderr();
    let color = stderr.is_terminal() && std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty());
    if color {
        eprintln!("\x1b[1;31merror\x1b[0m: {e}");
    } else {
        eprintln!("error: {e}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            config,
            out,
            seed,
            threads,
        } => run(&config, out, seed, threads),
        Command::ListScenarios => {
            for s in Scenario::ALL {
                println!("{:<18} {}", s.name(), s.summary());
            }
            Ok(())
        }
        Command::Validate { config } => validate(&config),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report_error(&e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
