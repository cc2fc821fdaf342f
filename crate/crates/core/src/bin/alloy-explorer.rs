use std::io::Write;
use std::process::ExitCode;

use alloy_explorer::cli::{cmd_ingest, cmd_query, cmd_serve, cmd_synth, cmd_train, Cli, Command};
use clap::Parser;
use serde::Serialize;

fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Ingest(args) => print_json(&cmd_ingest(&args)?),
        Command::Synth(args) => print_json(&cmd_synth(&args)?),
        Command::Train(args) => {
            let report = cmd_train(&args)?;
            eprint!("{}", report.held_out.to_table());
            eprint!("{}", report.in_sample.to_table());
            print_json(&report)
        }
        Command::Query(args) => print_json(&cmd_query(&args)?),
        Command::Serve(args) => {
            cmd_serve(&args, |addr| {
                println!("listening on http://{addr}");
                let _ = std::io::stdout().flush();
            })?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
