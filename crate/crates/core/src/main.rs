use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser};
use csop::cli::{self, Format, Subcommand};
use csop::error::{ConfigError, Error};

/// Antilinear spectra, gap decay bounds and complex-scaling resonances.
#[derive(Parser)]
#[command(name = "csop", version)]
struct Args {
    command: Subcommand,
    /// `key = value` configuration file.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Extra `key=value` settings applied after the file.
    #[arg(short = 's', long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Overrides the `format` key.
    #[arg(short, long, value_enum)]
    format: Option<Format>,
    /// Write here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            if e.use_stderr() {
                eprintln!("\n{}", Args::command().render_usage());
            }
            return ExitCode::from(code);
        }
    };
    match execute(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(args: Args) -> Result<(), Error> {
    cli::configure_threads()?;
    let mut text = match &args.config {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Error::Io { path: p.display().to_string(), message: e.to_string() })?,
        None => String::new(),
    };
    for kv in &args.set {
        let (k, v) =
            kv.split_once('=').ok_or_else(|| ConfigError::Usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        text.push_str(&format!("\n{} = {}", k.trim(), v.trim()));
    }
    let mut cfg = cli::parse_config(args.command, &text)?;
    if let Some(f) = args.format {
        cfg.format = f;
    }
    let table = cli::run(&cfg)?;
    let bytes = cli::emit(&table, cfg.format);
    match &args.output {
        Some(p) => {
            std::fs::write(p, &bytes).map_err(|e| Error::Io { path: p.display().to_string(), message: e.to_string() })
        }
        None => {
            std::io::stdout().write_all(&bytes).map_err(|e| Error::Io { path: "stdout".into(), message: e.to_string() })
        }
    }
}
