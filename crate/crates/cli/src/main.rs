use std::io::Write;
use std::process::ExitCode;

use ainf_cli::commands::{run, Cli, EXIT_OK, EXIT_VERIFY};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.command.common().json;
    match run(cli) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(report.render(json).as_bytes());
            ExitCode::from(if report.pass { EXIT_OK } else { EXIT_VERIFY } as u8)
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code() as u8)
        }
    }
}
