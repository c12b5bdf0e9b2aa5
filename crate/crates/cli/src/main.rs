use std::io;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use gmre::commands::{run, Cli};
use gmre::exit;

fn main() -> ExitCode {
    gmre::configure_threads();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit::OK,
                _ => exit::USAGE,
            };
            return ExitCode::from(code as u8);
        }
    };
    let code = run(cli, &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}
