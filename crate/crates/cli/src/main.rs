use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mimo_duel_cli::config::{apply_overrides, load_config, preset, Figure};
use mimo_duel_cli::figures::{run_figure, simulate_probe};
use mimo_duel_cli::verify::{Mode, Verifier};
use mimo_duel_cli::{CliError, Result};

#[derive(Parser)]
#[command(name = "mimo-duel", version, about = "LS-MIMO vs network MIMO downlink simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// `key = value` file applied on top of the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Single `key=value` override, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset: a figure preset writes its figure, otherwise a single probe run.
    Simulate {
        #[arg(long, default_value = "table1")]
        preset: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the acceptance criteria and print a report.
    Verify {
        #[arg(long, conflicts_with = "full")]
        quick: bool,
        #[arg(long)]
        full: bool,
        /// Also write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the curve table and summary of one figure.
    Figure {
        /// fig3, fig4, fig5, fig6 or fig7.
        name: String,
        #[command(flatten)]
        run: RunArgs,
    },
}

fn resolve(preset_name: &str, run: &RunArgs) -> Result<(mimo_duel::montecarlo::SimulationConfig, Option<Figure>)> {
    let p = preset(preset_name)?;
    let mut config = match &run.config {
        Some(path) => load_config(path, p.config)?,
        None => p.config,
    };
    config = apply_overrides(config, &run.overrides)?;
    if let Some(seed) = run.seed {
        config.seed = seed;
    }
    if let Some(trials) = run.trials {
        config.trials = trials;
    }
    config.validate()?;
    Ok((config, p.figure))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { preset, run } => {
            let (config, figure) = resolve(&preset, &run)?;
            let out = match figure {
                Some(f) => run_figure(f, &config, &run.out)?,
                None => simulate_probe(&config, &run.out)?,
            };
            println!("wrote {} and {}", out.csv.display(), out.json.display());
        }
        Command::Figure { name, run } => {
            let figure = Figure::parse(&name)?;
            let (config, _) = resolve(figure.name(), &run)?;
            let out = run_figure(figure, &config, &run.out)?;
            println!("wrote {} and {}", out.csv.display(), out.json.display());
        }
        Command::Verify { quick: _, full, out } => {
            let mode = if full { Mode::Full } else { Mode::Quick };
            let report = Verifier::new(mode).run_all();
            for c in &report.criteria {
                println!("{c}");
            }
            if let Some(path) = out {
                std::fs::write(&path, serde_json::to_string_pretty(&report)?)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            }
            let failed: Vec<&str> = report.criteria.iter().filter(|c| !c.passed).map(|c| c.id.as_str()).collect();
            if !failed.is_empty() {
                return Err(CliError::Acceptance(format!("criteria {} failed", failed.join(", "))));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
