mod args;
mod commands;
mod experiments;
mod output;
mod spec;

use std::process::ExitCode;

use cantorlab::numerics::set_default_precision;
use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::Cli;
use output::{num, render, Report};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(cantorlab::Error),
    Io(String),
}

impl From<cantorlab::Error> for CliError {
    fn from(e: cantorlab::Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Core(cantorlab::Error::NonConvergent { .. }) => 3,
            CliError::Core(_) => 2,
        }
    }

    /// Partial output that accompanies a non-convergent limit.
    pub fn partial_report(&self) -> Option<Report> {
        let best = match self {
            CliError::Core(e) => e.best_estimate()?,
            _ => return None,
        };
        Some(Report::json(json!({
            "status": "non-convergent",
            "message": self.to_string(),
            "estimate": num(&best.value),
            "error_bound": num(&best.error_bound),
            "terms_used": best.terms_used,
            "converged": false,
        }))
        .with_status(self.exit_code()))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if let Err(e) = set_default_precision(cli.precision_bits) {
        eprintln!("usage error: {e}");
        return ExitCode::from(1);
    }
    let result = commands::run(&cli);
    let (report, code) = match result {
        Ok(r) => {
            let status = r.status;
            (Some(r), status)
        }
        Err(e) => {
            eprintln!("error: {e}");
            (e.partial_report(), e.exit_code())
        }
    };
    if let Some(report) = report {
        let written = render(&report, cli.format).and_then(|bytes| output::emit(&bytes, cli.output.as_deref()));
        if let Err(e) = written {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    }
    ExitCode::from(code)
}
