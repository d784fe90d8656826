use std::io::{self, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use rowortho_cli::commands::{run_check, run_solve, run_stream, Cli, Command, Output, EXIT_ERROR};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_ERROR),
            };
        }
    };

    let stdout = io::stdout();
    let result = match &cli.command {
        Command::Solve(args) => run_solve(args).map(|o| emit(&stdout, o)),
        Command::Check(args) => run_check(args).map(|o| emit(&stdout, o)),
        Command::Stream(args) => {
            let mut out = stdout.lock();
            let code = run_stream(args, io::stdin().lock(), &mut out);
            let _ = out.flush();
            code
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn emit(stdout: &io::Stdout, output: Output) -> u8 {
    let mut out = stdout.lock();
    let _ = out.write_all(output.stdout.as_bytes());
    let _ = out.flush();
    output.code
}
