//! Reproducibility record written next to every report file.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::commands::Report;
use crate::config::RunConfig;
use ietflow::Result;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Manifest {
    pub command: String,
    /// The merged configuration in canonical form.
    pub config: String,
    pub config_sha256: String,
    pub library_version: &'static str,
    pub precision_bits: u32,
    pub seed: u64,
    pub report: String,
    pub report_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<serde_json::Value>,
}

impl Manifest {
    pub fn new(cfg: &RunConfig, report_name: &str, report: &Report) -> Result<Self> {
        let config = cfg.emit();
        Ok(Manifest {
            command: cfg.require("command")?.to_string(),
            config_sha256: sha256(&config),
            config,
            library_version: ietflow::VERSION,
            precision_bits: cfg.precision()?,
            seed: cfg.seed()?,
            report: report_name.to_string(),
            report_sha256: sha256(&report.body),
            summary: report.summary.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        format!(
            "{}\n",
            serde_json::to_string_pretty(self).expect("serializable")
        )
    }
}

fn sha256(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}
