//! Configuration, execution and output of `spectral-surgery` experiments.

pub mod args;
pub mod config;
pub mod run;

use std::io::Write;
use std::path::Path;

pub use config::{Experiment, ExperimentConfig, OutputFormat};
pub use run::run;
use spectral_surgery::report::Report;

/// Exit status for a configuration that cannot be parsed or is out of domain.
pub const EXIT_CONFIG: u8 = 2;
/// Exit status when a numeric check fails.
pub const EXIT_CHECK: u8 = 1;

/// Serialized report in the requested format.
pub fn render(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(report).expect("report serializes") + "\n",
        OutputFormat::Csv => report.to_csv(),
    }
}

/// Writes `contents` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| std::io::Error::other("output path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}
