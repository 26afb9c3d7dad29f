use std::io;
use std::process::ExitCode;

use clap::Parser;
use fog_cli::{dispatch, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdin = io::stdin();
    let code = dispatch(&cli, stdin.lock(), &mut io::stdout(), &mut io::stderr());
    ExitCode::from(code as u8)
}
