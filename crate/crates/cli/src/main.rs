use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rootex_cli::commands::{self, batch_exit_code, Command, GenMode, Options};
use rootex_cli::ResultRecord;

/// Root extraction in finite Abelian groups.
#[derive(Parser)]
#[command(name = "rootex", version, about)]
struct Cli {
    /// Print results as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Include per-block reports and iteration traces.
    #[arg(long, global = true)]
    verbose: bool,
    /// Report the number of group operations used.
    #[arg(long, global = true)]
    count_ops: bool,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Find a basis P with K = Σ m_i P_i, or explain why none exists.
    Extract(Input),
    /// Decide existence without building a basis.
    Check(Input),
    /// Check the instance's claimed_basis.
    Verify(Input),
    /// Exhaustive search, for small groups.
    Oracle {
        #[command(flatten)]
        input: Input,
        /// Largest group the search will enumerate.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Print a random instance.
    Gen {
        /// Structure, e.g. "2^1,2^3,2^4" or "Z/2xZ/8xZ/16".
        #[arg(long)]
        factors: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// K built from a hidden basis, so a solution exists.
        #[arg(long, conflicts_with = "random")]
        solvable: bool,
        /// K and the multipliers drawn uniformly.
        #[arg(long)]
        random: bool,
    },
}

#[derive(Args)]
struct Input {
    /// Instance file, or "-" for standard input.
    #[arg(required_unless_present = "batch", conflicts_with = "batch")]
    instance: Option<PathBuf>,
    /// Run every *.json file in this directory.
    #[arg(long)]
    batch: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, input, budget) = match cli.command {
        Sub::Extract(input) => (Command::Extract, input, None),
        Sub::Check(input) => (Command::Check, input, None),
        Sub::Verify(input) => (Command::Verify, input, None),
        Sub::Oracle { input, budget } => (Command::Oracle, input, budget),
        Sub::Gen {
            factors,
            seed,
            solvable: _,
            random,
        } => {
            let mode = if random {
                GenMode::Random
            } else {
                GenMode::Solvable
            };
            return match commands::generate(&factors, seed, mode) {
                Ok(file) => {
                    println!("{}", file.to_json());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("rootex: invalid input: {e:#}");
                    ExitCode::from(1)
                }
            };
        }
    };
    let opts = Options {
        verbose: cli.verbose,
        budget,
    };

    let records = match (&input.batch, &input.instance) {
        (Some(dir), _) => match commands::run_batch(cmd, dir, &opts) {
            Ok(records) => records,
            Err(e) => vec![ResultRecord::invalid_input(format!("{e:#}"))],
        },
        (None, Some(path)) if path.as_os_str() == "-" => {
            let mut text = String::new();
            match io::stdin().read_to_string(&mut text) {
                Ok(_) => vec![commands::run(cmd, &text, &opts)],
                Err(e) => vec![ResultRecord::invalid_input(format!(
                    "cannot read input: {e}"
                ))],
            }
        }
        (None, Some(path)) => vec![commands::run_file(cmd, path, &opts)],
        (None, None) => unreachable!("clap requires an instance or --batch"),
    };

    for record in &records {
        for w in &record.warnings {
            eprintln!("rootex: warning: {w}");
        }
        if cli.json {
            println!("{}", record.to_json());
        } else {
            print!("{}", record.to_text(cli.count_ops));
        }
    }
    ExitCode::from(batch_exit_code(&records) as u8)
}
