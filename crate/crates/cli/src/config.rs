use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use zetalab_core::primes::Limits;

use crate::CliError;

/// Flat run configuration. Every field is optional; a command fills in its own
/// defaults. Values given on the command line replace values from the file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub sieve_ceiling: Option<u64>,
    pub classify_ceiling: Option<u64>,
    pub segment_size: Option<u64>,
    pub x_list: Option<Vec<u64>>,
    pub phi_slack: Option<f64>,
    pub t_lo: Option<f64>,
    pub t_hi: Option<f64>,
    pub step: Option<f64>,
    pub box_points: Option<usize>,
    pub samples: Option<usize>,
    pub paths: Option<Vec<(f64, f64)>>,
    pub n_list: Option<Vec<u64>>,
    pub m: Option<usize>,
    pub sigma_list: Option<Vec<f64>>,
    pub n_terms: Option<u64>,
    pub threshold: Option<f64>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($f:ident),*) => {
        RunConfig { $($f: $top.$f.or($base.$f)),* }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// `top` wins wherever it has a value.
    pub fn overlay(self, top: RunConfig) -> RunConfig {
        let base = self;
        overlay!(
            base,
            top,
            command,
            out,
            seed,
            tol,
            sieve_ceiling,
            classify_ceiling,
            segment_size,
            x_list,
            phi_slack,
            t_lo,
            t_hi,
            step,
            box_points,
            samples,
            paths,
            n_list,
            m,
            sigma_list,
            n_terms,
            threshold
        )
    }

    pub fn limits(&self) -> Result<Limits, CliError> {
        let d = Limits::default();
        let limits = Limits {
            sieve_ceiling: self.sieve_ceiling.unwrap_or(d.sieve_ceiling),
            segment_size: self.segment_size.unwrap_or(d.segment_size),
            classify_ceiling: self.classify_ceiling.unwrap_or(d.classify_ceiling),
        };
        if limits.segment_size < 64 {
            return Err(CliError::Config(format!(
                "segment_size must be at least 64, got {}",
                limits.segment_size
            )));
        }
        Ok(limits)
    }

    pub fn tol_in(&self, default: f64, lo: f64, hi: f64) -> Result<f64, CliError> {
        let tol = self.tol.unwrap_or(default);
        if !(lo..=hi).contains(&tol) {
            return Err(CliError::Config(format!(
                "tol must lie in [{lo:e}, {hi:e}] for this command, got {tol:e}"
            )));
        }
        Ok(tol)
    }
}

pub fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(CliError::Config(format!(
            "{name} must be positive, got {v}"
        )));
    }
    Ok(v)
}
