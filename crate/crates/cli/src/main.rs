use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use subsurf_cli::{canonical_json, execute, Cli, EXIT_ERROR};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let out = execute(&cli);
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(canonical_json(&out.report).as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(EXIT_ERROR as u8);
    }
    eprintln!("{}", out.summary);
    ExitCode::from(out.code as u8)
}
