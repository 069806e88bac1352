use clap::Parser;
use feshpulse_cli::{parse_config, run, Command, MethodChoice, Overrides};
use std::path::PathBuf;
use std::process::ExitCode;

/// Dissociation spectra of Feshbach molecules under magnetic-field pulses.
#[derive(Parser, Debug)]
#[command(name = "feshpulse", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Spectrum method (for `compare`: the asymptotic form).
    #[arg(long, global = true, value_enum)]
    method: Option<MethodChoice>,
    /// Exit with status 4 when a validity check fails.
    #[arg(long, global = true)]
    strict: bool,
    /// Number of grid points (ωT grid, or uniform time points for `decay`).
    #[arg(long, global = true)]
    grid_points: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let Some(config) = args.config.as_deref() else {
        eprintln!("error: --config is required");
        return ExitCode::from(2);
    };
    let ov = Overrides { out: args.out, method: args.method, grid_points: args.grid_points, strict: args.strict };
    let result = parse_config(config).and_then(|cfg| run(args.command, &cfg, &ov));
    match result {
        Ok(outcome) => {
            for m in &outcome.messages {
                println!("{m}");
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            ExitCode::from(outcome.exit_code(ov.strict) as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
