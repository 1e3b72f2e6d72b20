use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pfem::driver::{exit_code, run, RunConfig};

#[derive(Parser)]
#[command(name = "pfem", version, about = "p-version FEM benchmark runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a uniform sweep or an adaptive loop described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run { config } = cli.command;
    let outcome = RunConfig::from_path(&config).and_then(|cfg| {
        let code = run(&cfg)?;
        Ok((cfg, code))
    });
    match outcome {
        Ok((cfg, code)) => {
            if code == 4 {
                eprintln!(
                    "pfem: adaptive loop stagnated; see {}",
                    cfg.output.join("report.txt").display()
                );
            } else {
                println!("results written to {}", cfg.output.display());
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("pfem: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
