use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use jointvol_cli::{cmd_greeks, cmd_price, cmd_table, cmd_validate, CliError, Outcome, RunConfig};

#[derive(Parser)]
#[command(name = "jointvol", version, about = "Price joint asset / realized-variance claims")]
struct Cli {
    /// Suppress human-readable output.
    #[arg(long, global = true)]
    quiet: bool,

    /// Directory for reports; a config's `output` key takes precedence.
    #[arg(long, global = true, env = "JOINTVOL_OUTPUT_DIR")]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Price the contract in a config file.
    Price { config: PathBuf },
    /// Contour Delta and Gamma with finite-difference cross-checks.
    Greeks { config: PathBuf },
    /// Reproduce a reference table (1 to 5).
    Table {
        id: u8,
        /// Simulation paths per row; 0 skips the simulation.
        #[arg(long, default_value_t = 1_000_000)]
        mc_paths: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
    /// Check a config without pricing.
    Validate { config: PathBuf },
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into())
}

fn run(cli: &Cli) -> Result<(Outcome, Option<PathBuf>), CliError> {
    let from_config = |verb: &str, path: &Path, f: fn(&jointvol_cli::Resolved) -> jointvol_cli::Result<Outcome>| {
        let cfg = RunConfig::load(path)?.resolve()?;
        let dest = cfg
            .output
            .clone()
            .or_else(|| cli.out_dir.as_ref().map(|d| d.join(format!("{verb}-{}.csv", stem(path)))));
        Ok((f(&cfg)?, dest))
    };
    match &cli.command {
        Command::Price { config } => from_config("price", config, cmd_price),
        Command::Greeks { config } => from_config("greeks", config, cmd_greeks),
        Command::Validate { config } => from_config("validate", config, cmd_validate),
        Command::Table { id, mc_paths, seed } => {
            let dest = cli.out_dir.as_ref().map(|d| d.join(format!("table-{id}.csv")));
            Ok((cmd_table(*id, *mc_paths, *seed)?, dest))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = run(&cli).and_then(|(outcome, dest)| {
        if !cli.quiet {
            print!("{}", outcome.human);
        }
        match dest {
            Some(path) => {
                outcome.report.write_to(&path)?;
                if !cli.quiet {
                    println!("report written to {}", path.display());
                }
            }
            None => print!("{}", outcome.report.render()),
        }
        match outcome.breach {
            Some(b) => Err(CliError::ToleranceBreach(b)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
