//! Configuration, dispatch and table output behind the `csop` binary.

mod config;
mod io;
mod run;
mod table;

pub use config::{parse_complex, parse_config, serialize_config, Format, RunConfig, Subcommand, Value};
pub use io::{
    format_matrix_csv, parse_matrix_csv, parse_potential_csv, read_matrix_csv, read_potential_csv, SampledPotential,
};
pub use run::run;
pub use table::{emit, emit_csv, emit_json, format_float, parse_csv, parse_json, ResultTable};

use crate::error::ConfigError;

/// Caps the global rayon pool at `CSOP_THREADS` when that variable is set.
pub fn configure_threads() -> Result<(), ConfigError> {
    let Ok(raw) = std::env::var("CSOP_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|n| *n >= 1).ok_or_else(|| ConfigError::Precondition {
        key: "CSOP_THREADS".into(),
        constraint: format!("a positive integer, got `{raw}`"),
    })?;
    // A pool that already exists (tests, embedding) is left alone.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
