//! Optional TOML configuration. Command-line flags override every field.
//!
//! ```toml
//! precision_bits = 256
//! nmax = 100
//! q_order = 150
//! samples = 16
//! jobs = 8
//! method = "reduced"   # reduced | lattice | qseries
//! format = "text"      # text | json | csv
//! ```

use std::path::Path;

use fricke_core::evaluator::{EvalConfig, Method};
use fricke_core::zero_locator::ScanConfig;
use serde::Deserialize;

use crate::output::Format;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub precision_bits: Option<u32>,
    pub nmax: Option<u32>,
    pub q_order: Option<usize>,
    pub samples: Option<u32>,
    pub jobs: Option<usize>,
    pub method: Option<Method>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Settings after merging defaults, the config file and flags.
#[derive(Debug, Clone)]
pub struct Settings {
    pub eval: EvalConfig,
    pub scan: ScanConfig,
    pub format: Format,
    pub jobs: Option<usize>,
}

#[derive(Debug, Default)]
pub struct Overrides {
    pub precision_bits: Option<u32>,
    pub nmax: Option<u32>,
    pub q_order: Option<usize>,
    pub samples: Option<u32>,
    pub jobs: Option<usize>,
    pub method: Option<Method>,
    pub format: Option<Format>,
}

pub fn merge(file: FileConfig, flags: Overrides) -> Settings {
    let mut eval = EvalConfig::default();
    let mut scan = ScanConfig::default();
    if let Some(v) = flags.precision_bits.or(file.precision_bits) {
        eval.precision_bits = v;
    }
    if let Some(v) = flags.nmax.or(file.nmax) {
        eval.nmax = v;
    }
    if let Some(v) = flags.q_order.or(file.q_order) {
        eval.q_order = v;
    }
    if let Some(v) = flags.method.or(file.method) {
        eval.method = v;
    }
    if let Some(v) = flags.samples.or(file.samples) {
        scan = scan.with_samples(v);
    }
    Settings {
        eval,
        scan,
        format: flags.format.or(file.format).unwrap_or(Format::Text),
        jobs: flags.jobs.or(file.jobs),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win() {
        let file: FileConfig = toml::from_str("precision_bits = 300\nnmax = 50\nformat = \"csv\"").unwrap();
        let s = merge(file, Overrides { precision_bits: Some(200), ..Default::default() });
        assert_eq!(s.eval.precision_bits, 200);
        assert_eq!(s.eval.nmax, 50);
        assert_eq!(s.format, Format::Csv);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<FileConfig>("precision = 3").is_err());
    }
}
