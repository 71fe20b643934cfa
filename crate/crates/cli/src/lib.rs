//! File formats and the command-line driver for `hecke-trace-core`.

pub mod cli;
pub mod commands;
pub mod formats;
pub mod output;

use hecke_trace_core::Error;

/// A failed command. Validation failures exit with status 1, numerical
/// failures with status 2.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

/// Parse `args` (program name first), run the command and return the text
/// to print, or the error.
pub fn run_args<I, T>(args: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let parsed = cli::Cli::try_parse_from(args).map_err(|e| {
        CliError::Validation(
            e.to_string()
                .trim_end()
                .trim_start_matches("error: ")
                .to_string(),
        )
    })?;
    let format = parsed.output;
    let report = commands::run(parsed)?;
    Ok(report.render(format))
}
