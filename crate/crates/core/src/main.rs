use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use weilcalc::report::Report;
use weilcalc::runner::{bracket_report, run_checks};
use weilcalc::script::{parse_script, Script};
use weilcalc::suite::{run_suite, SuiteOptions};

#[derive(Parser)]
#[command(name = "weilcalc", version, about = "Exact checks for Weil algebras, limit diagrams and microflows")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run the check directives of a .weil script.
    Check { file: PathBuf },
    /// Run the built-in verification suite.
    Suite {
        /// 3, 4, 5, 6 or all.
        #[arg(long, default_value = "all")]
        section: String,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Largest model dimension k.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Largest degree of random polynomial coefficients.
        #[arg(long, default_value_t = 2)]
        degree: u32,
    },
    /// Print the Lie bracket of two fields declared in a script.
    Bracket {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
}

fn load(path: &PathBuf) -> Result<Script, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_script(&text).map_err(|e| format!("{}:{e}", path.display()))
}

fn run(cli: &Cli) -> Result<Report, String> {
    match &cli.command {
        Command::Check { file } => Ok(run_checks(&load(file)?)),
        Command::Bracket { file, x, y } => Ok(bracket_report(&load(file)?, x, y)),
        Command::Suite { section, trials, seed, dim, degree } => {
            let section = match section.as_str() {
                "all" => None,
                s => match s.parse::<u8>() {
                    Ok(n @ 3..=6) => Some(n),
                    _ => return Err(format!("unknown section `{s}` (expected 3, 4, 5, 6 or all)")),
                },
            };
            if *dim == 0 {
                return Err("--dim must be at least 1".into());
            }
            Ok(run_suite(&SuiteOptions { section, trials: *trials, seed: *seed, dim: *dim, degree: *degree }))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            match cli.format {
                Format::Text => print!("{}", report.to_text()),
                Format::Json => println!("{}", report.to_json()),
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
