use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use phmc_cli::{config, init_workers, run, Command};

/// Particle MCMC experiments for state-space models.
#[derive(Debug, Parser)]
#[command(name = "phmc", version)]
struct Args {
    command: Command,
    /// JSON experiment config.
    #[arg(short, long)]
    config: PathBuf,
    /// Override a top-level scalar config field, e.g. `--set seed=3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory; shorthand for `--set output=DIR`.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            // Usage errors are config errors; help and version are not errors.
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = init_workers().and_then(|()| config::load(&args.config, &args.overrides)).and_then(|mut loaded| {
        if let Some(dir) = args.output {
            loaded.set_output(dir);
        }
        run(args.command, &loaded)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("phmc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
