//! Binary entry point. Exit codes: 0 success, 1 usage error, 2 data or
//! numeric error.

mod cli;

use clap::error::ErrorKind;
use clap::Parser;

fn main() {
    let parsed = match cli::Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = parsed.run() {
        eprintln!("error: {err}");
        std::process::exit(2);
    }
}
