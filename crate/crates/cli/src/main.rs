mod args;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;
use semicircle_core::exec::Exec;

use args::{Cli, Command};
use commands::{Ctx, PathArgs};
use config::RunConfig;
use output::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let name = cli.command.name();
    if let Some(sub) = &file.subcommand {
        if sub != name {
            return Err(CliError::Config(format!("config is for `{sub}`, not `{name}`")));
        }
    }
    let format = cli.global.format.or(file.format).unwrap_or_default();
    let out = cli.global.out.clone().or_else(|| file.out.clone());

    let threads = cli.global.threads.or(file.threads);
    if threads == Some(0) {
        return Err(CliError::Config("--threads must be at least 1".into()));
    }
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start thread pool: {e}")))?;
    }
    let exec = if threads == Some(1) {
        Exec::Sequential
    } else {
        Exec::Parallel
    };

    let ctx = Ctx {
        file,
        exec,
        reproducible: cli.global.reproducible,
        threshold: cli.global.threshold,
    };
    let report = match &cli.command {
        Command::Simulate(a) => commands::simulate(&ctx, a),
        Command::Esd(a) => commands::esd(&ctx, a),
        Command::Distance(a) => commands::distance(&ctx, a),
        Command::Moments { run, max_k } => commands::moments(&ctx, run, *max_k),
        Command::Graphs { run, k } => commands::graphs(&ctx, run, *k),
        Command::Interpolate {
            run,
            kind_y,
            phi_points,
            z_re,
            z_im,
        } => commands::interpolate(
            &ctx,
            run,
            PathArgs {
                kind_y: *kind_y,
                phi_points: *phi_points,
                z_re,
                z_im: *z_im,
            },
        ),
        Command::Counterexample(a) => commands::counterexample(&ctx, a),
        Command::Check(a) => commands::check(&ctx, a),
    }?;

    output::write(&report.render(format), out.as_deref())?;
    match report.violation {
        Some(msg) if cli.global.assert => Err(CliError::Assert(msg)),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("semicircle-lab: {}", e.message());
            ExitCode::from(e.code() as u8)
        }
    }
}
