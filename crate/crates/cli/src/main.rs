use std::process::ExitCode;

use clap::Parser;
use qfq_cli::{render, render_error, run, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::parse();
    match run(&config) {
        Ok(out) => {
            println!("{}", render(&out.value, config.format));
            match out.failure {
                None => ExitCode::SUCCESS,
                Some(err) => {
                    eprintln!("{}", render_error(&err, config.format));
                    ExitCode::from(1)
                }
            }
        }
        Err(err) => {
            eprintln!("{}", render_error(&err, config.format));
            ExitCode::from(err.exit_code())
        }
    }
}
