use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use sidon_core::cli::{error_json, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(rendered) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &rendered.body),
                None => std::io::stdout().write_all(rendered.body.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("{}", error_json(&sidon_core::Error::InvalidInput(format!("cannot write output: {e}"))));
                return ExitCode::from(2);
            }
            ExitCode::from(rendered.exit_code() as u8)
        }
        Err(err) => {
            eprintln!("{}", error_json(&err));
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
