use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    // help and version requests print through clap and succeed
    if let Err(e) = <hecke_trace::cli::Cli as clap::Parser>::try_parse_from(&args) {
        if matches!(
            e.kind(),
            ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
        ) {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    }
    match hecke_trace::run_args(&args) {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            if out
                .write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .is_err()
            {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            for line in e.to_string().lines().filter(|l| !l.trim().is_empty()) {
                eprintln!("ERROR: {line}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
