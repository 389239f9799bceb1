//! Entry point for the `agony` binary.

use std::process::ExitCode;

fn main() -> ExitCode {
    agony_cli::commands::run()
}
