use std::process::ExitCode;

use clap::Parser;
use crystred::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("warning: thread pool: {e}");
        }
    }
    let outcome = match run(&cli) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    match outcome.emit(cli.json.as_deref()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
