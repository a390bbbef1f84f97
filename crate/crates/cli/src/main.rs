use std::io::Write;
use std::process::ExitCode;

use asn_cli::commands::{run, Command};
use asn_cli::CliError;
use clap::error::ErrorKind;
use clap::Parser;

/// Alpha-skew-normal fitting, simulation and data summaries.
#[derive(Debug, Parser)]
#[command(name = "asn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn fail(err: &CliError) -> ExitCode {
    eprintln!("{}", err.to_line());
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            // clap renders a block; fold the message part into one line
            let text = e.to_string();
            let message: Vec<&str> = text
                .lines()
                .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect();
            return fail(&CliError::Usage(message.join(" ").trim_start_matches("error: ").to_string()));
        }
    };
    match run(&cli.command) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return fail(&CliError::Data(format!("cannot write output: {e}")));
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}
