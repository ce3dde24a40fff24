use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hsred_core::cli::{error_json, execute, Command, RunManifest};
use hsred_core::Error;

/// Hilbert-space reduction experiments on frustrated spin ladders.
#[derive(Parser, Debug)]
#[command(name = "hsred", version)]
struct Args {
    /// spectrum | reduce | scan | oracle-check
    command: String,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the config file.
    #[arg(long)]
    seed: Option<u64>,
}

fn run(args: &Args) -> Result<Vec<PathBuf>, Error> {
    let command: Command = args.command.parse()?;
    let manifest = RunManifest::load(command, &args.config, &args.out, args.seed)?;
    execute(&manifest)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let body = error_json(&e);
            eprintln!("{body}");
            if args.out.is_dir() {
                let _ = std::fs::write(args.out.join("error.json"), body.to_string());
            }
            ExitCode::FAILURE
        }
    }
}
