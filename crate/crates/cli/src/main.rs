use clap::Parser;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = optcorr_cli::Cli::parse();
    match optcorr_cli::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
