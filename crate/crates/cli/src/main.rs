use std::process::ExitCode;

use mathieu_cli::{emit, execute, parse, ParseFailure, EXIT_NUMERICAL, EXIT_USAGE};

fn main() -> ExitCode {
    let job = match parse(std::env::args_os()) {
        Ok(job) => job,
        Err(ParseFailure::Info(text)) => {
            print!("{text}");
            return ExitCode::SUCCESS;
        }
        Err(ParseFailure::Usage(msg)) => {
            eprintln!("{}", msg.trim_end());
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let artifact = execute(&job);
    if let Some(diag) = &artifact.diagnostic {
        eprintln!("{diag}");
    }
    if let Err(e) = emit(&job, &artifact) {
        eprintln!("failed to write output: {e}");
        return ExitCode::from(EXIT_NUMERICAL);
    }
    ExitCode::from(artifact.exit_code)
}
