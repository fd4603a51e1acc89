use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use revtorus_cli::config::ConfigError;
use revtorus_cli::{run, Command};

/// Constant curvature curves, stable regions and isoperimetric profiles on
/// tori of revolution.
#[derive(Debug, Parser)]
#[command(name = "revtorus", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// TOML run configuration.
    #[arg(short, long)]
    config: PathBuf,
    /// Output directory; overrides REVTORUS_OUT and the config file.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Do not echo the report.
    #[arg(short, long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(args.command, &args.config, args.out.as_deref()) {
        Ok(out) => {
            if !args.quiet {
                print!("{}", out.report);
                for f in &out.files {
                    println!("wrote {}", f.display());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
