use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ssh_passage::experiments::{run_experiment, write_table, ExperimentConfig, ExperimentKind};
use ssh_passage::Error;

/// Default output directory when neither `--out` nor `output.dir` is given.
const OUT_ENV: &str = "SSH_PASSAGE_OUT";

#[derive(Parser, Debug)]
#[command(
    name = "ssh-passage",
    version,
    about = "Giant atom between two SSH chains: spectra, dark states and adiabatic transfer",
    after_help = "Run `ssh-passage list` for the available experiments."
)]
struct Cli {
    /// Experiment name, or `list`.
    experiment: String,

    /// TOML configuration file.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Override a configuration value, e.g. `--set sweep.omega=2e-4`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Print the resolved configuration and exit.
    #[arg(long)]
    dry_run: bool,
}

fn list() {
    let width = ExperimentKind::ALL.iter().map(|k| k.name().len()).max().unwrap_or(0);
    for k in ExperimentKind::ALL {
        println!("{:width$}  {:12}  {}", k.name(), k.figure(), k.description());
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let kind: ExperimentKind = cli.experiment.parse()?;
    let config = ExperimentConfig::resolve(kind, cli.config.as_deref(), &cli.overrides)?;
    if cli.dry_run {
        print!("{}", config.to_toml());
        return Ok(());
    }
    let dir = cli
        .out
        .or_else(|| config.output.dir.clone())
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));

    std::fs::create_dir_all(&dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    })?;
    let config_path = dir.join(format!("{}.config.toml", kind.name()));
    std::fs::write(&config_path, config.to_toml()).map_err(|e| Error::Io {
        path: config_path.display().to_string(),
        message: e.to_string(),
    })?;

    let formats = config.output.formats.clone();
    run_experiment(&config, &mut |table| {
        for path in write_table(&table, &dir, &formats)? {
            println!("{}", path.display());
        }
        Ok(())
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.experiment == "list" {
        list();
        return ExitCode::SUCCESS;
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 1 })
        }
    }
}
