use std::process::ExitCode;

use clap::Parser;
use spectral_surgery::Error;
use spectral_surgery_cli::args::Cli;
use spectral_surgery_cli::{render, run, write_atomic, ExperimentConfig, EXIT_CHECK, EXIT_CONFIG};

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_CONFIG)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match (&cli.config, &cli.command) {
        (Some(_), Some(_)) => return config_error("--config and a subcommand are mutually exclusive"),
        (None, None) => return config_error("a subcommand or --config is required (see --help)"),
        (Some(path), None) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return config_error(format!("cannot read {}: {e}", path.display())),
            };
            match ExperimentConfig::from_json(&text) {
                Ok(c) => c,
                Err(e) => return config_error(format!("invalid config {}: {e}", path.display())),
            }
        }
        (None, Some(cmd)) => match cmd.experiment() {
            Ok(x) => ExperimentConfig::new(x),
            Err(e) => return config_error(e),
        },
    };
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(o) = &cli.output {
        cfg.output = Some(o.clone());
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.print_config {
        println!("{}", cfg.to_json());
        return ExitCode::SUCCESS;
    }

    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e @ (Error::InvalidArgument(_) | Error::Domain(_) | Error::UnsupportedModel(_))) => return config_error(e),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CHECK);
        }
    };
    let text = render(&report, cfg.format);
    match &cfg.output {
        Some(path) => {
            if let Err(e) = write_atomic(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_CHECK);
            }
        }
        None => print!("{text}"),
    }
    if report.pass() {
        ExitCode::SUCCESS
    } else {
        for r in report.failing() {
            eprintln!("FAIL {}", r.name);
        }
        ExitCode::from(EXIT_CHECK)
    }
}
