use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::RunConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub dotphase: String,
    /// Random generator family used for sampling.
    pub generator: String,
}

impl Versions {
    pub fn current() -> Self {
        Self {
            dotphase: env!("CARGO_PKG_VERSION").to_string(),
            generator: dotphase::rng::GENERATOR_ID.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_clock_s: f64,
}

/// A complete run: the resolved config, its results, and run metadata.
/// Feeding `config` back in reproduces `results` exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub results: Value,
    pub warnings: Vec<String>,
    pub versions: Versions,
    pub timing: Timing,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is plain data");
        s.push('\n');
        s
    }
}
