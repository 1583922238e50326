use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cpair::{format_document, parse, run, RunOptions};
use cpair_core::adapted::DEFAULT_MAX_TENSORS;

#[derive(Parser)]
#[command(name = "cpair", version, about = "Check C-pair documents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check in a document.
    Check {
        file: PathBuf,
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
        /// Stop at the first check that raises an error.
        #[arg(long)]
        strict: bool,
        /// Cap on enumerated basis tensors.
        #[arg(long, default_value_t = DEFAULT_MAX_TENSORS)]
        max_tensors: usize,
        /// Seed for `check sweep` statements.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print a document in canonical form.
    Fmt { file: PathBuf },
}

fn read(file: &PathBuf) -> Result<String, ExitCode> {
    std::fs::read_to_string(file).map_err(|e| {
        eprintln!("error: {}: {e}", file.display());
        ExitCode::from(2)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { file, json, strict, max_tensors, seed } => {
            let text = match read(&file) {
                Ok(t) => t,
                Err(code) => return code,
            };
            let opts = RunOptions { max_tensors, seed, strict, ..RunOptions::default() };
            let report = match parse(&text).and_then(|doc| run(&doc, &opts)) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {}: {e}", file.display());
                    return ExitCode::from(2);
                }
            };
            if json {
                print!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Command::Fmt { file } => {
            let text = match read(&file) {
                Ok(t) => t,
                Err(code) => return code,
            };
            match parse(&text) {
                Ok(doc) => {
                    print!("{}", format_document(&doc));
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {}: {e}", file.display());
                    ExitCode::from(2)
                }
            }
        }
    }
}
