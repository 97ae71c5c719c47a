use std::io::{ErrorKind, Write};

use clap::Parser;
use rabi_dpt::args::Cli;
use rabi_dpt::config::UsageError;

fn main() {
    let cli = Cli::parse();
    match rabi_dpt::run(&cli.command) {
        Ok(summary) => {
            let text = serde_json::to_string_pretty(&summary).expect("serializable summary");
            let mut out = std::io::stdout().lock();
            if let Err(e) = writeln!(out, "{text}") {
                if e.kind() != ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    std::process::exit(1);
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                eprintln!("\nFor usage, run with --help.");
                std::process::exit(2);
            }
            std::process::exit(1);
        }
    }
}
