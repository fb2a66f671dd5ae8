use std::process::ExitCode;

use clap::Parser;
use strobe_tomo::cli::{exit_code, run, tolerance_from_env, Cli, TOLERANCE_ENV};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env = std::env::var(TOLERANCE_ENV).ok();
    let result = tolerance_from_env(env.as_deref()).and_then(|tol| {
        run(
            cli,
            &tol,
            &mut std::io::stdout().lock(),
            &mut std::io::stderr().lock(),
        )
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
