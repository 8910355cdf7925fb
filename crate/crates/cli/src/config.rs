//! Run-configuration file: a JSON document wrapping the physical
//! teleporter parameters plus optional sweep, Monte Carlo, and output
//! sections.  Unknown keys are rejected everywhere so typos fail loudly.

use cvteleport_core::TeleporterConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub teleporter: TeleporterConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub montecarlo: Option<MonteCarloConfig>,
    #[serde(default)]
    pub output: Option<OutputConfig>,
}

/// A one-dimensional parameter sweep.  For gain sweeps `gain_ratio` fixes
/// `gain_minus / gain_plus` while `gain_plus` runs over the range.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    #[serde(default = "one")]
    pub gain_ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloConfig {
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub format: Option<OutputFormat>,
    #[serde(default)]
    pub path: Option<String>,
}

fn one() -> f64 {
    1.0
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            start: 0.0,
            stop: 1.5,
            steps: 150,
            gain_ratio: 1.0,
        }
    }
}

impl RunConfig {
    /// Hash of the canonical JSON serialization, recorded in output
    /// provenance so result files can be traced back to their inputs.
    pub fn sha256(&self) -> String {
        use sha2::{Digest, Sha256};
        let canonical = serde_json::to_vec(self).expect("config serialization cannot fail");
        hex::encode(Sha256::digest(&canonical))
    }
}
