use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use qfc_cli::config::{Format, RunConfig};
use qfc_cli::{resolve, run, CliError, Command, RunOptions, EXIT_INPUT};

/// Biphoton frequency-comb simulator.
#[derive(Parser)]
#[command(name = "qfc", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file; defaults to `output.path` in the config, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Seed for randomised pipelines.
    #[arg(long)]
    seed: Option<u64>,
}

fn execute(args: &Args) -> Result<(), CliError> {
    let cfg = RunConfig::load(&args.config)?;
    let opts = RunOptions {
        format: args.format,
        seed: args.seed,
        base_dir: args.config.parent().map(|p| p.to_path_buf()),
    };
    let text = run(args.command, &cfg, &opts)?;
    let target = args.out.clone().or_else(|| {
        let path = cfg.output.as_ref()?.path.as_ref()?;
        Some(resolve(path, opts.base_dir.as_deref()))
    });
    match target {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qfc {}: {e}", args.command.name());
            let code = e.exit_code();
            ExitCode::from(u8::try_from(code).unwrap_or(EXIT_INPUT as u8))
        }
    }
}
