//! Scenario file: one JSON document with an optional section per command.
//!
//! ```json
//! {
//!   "relay":   { "relay_count": 10, "snr_threshold_db": 6.0 },
//!   "sharing": { "generator": { "secondary_count": 8 }, "solver": "brute-force" },
//!   "pso":     { "swarm_size": 40, "iterations": 200 },
//!   "sim":     { "node_count": 100, "offered_load_pps": 2.0 },
//!   "compare": { "node_counts": [20, 40, 60, 80, 100] }
//! }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crn_core::channel::{db_to_linear, NoiseModel};
use crn_core::relay::RelaySelectionConfig;
use crn_core::sharing::{InstanceFile, InstanceGenerator, SharingInstance};
use crn_core::sim::SimConfig;
use crn_core::swarm::PsoConfig;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RelaySection {
    pub relay_count: usize,
    pub source_power_w: f64,
    pub noise_power_w: f64,
    pub snr_threshold_db: f64,
}

impl Default for RelaySection {
    fn default() -> Self {
        Self {
            relay_count: 10,
            source_power_w: 10.0,
            noise_power_w: 1.0,
            snr_threshold_db: 6.0,
        }
    }
}

impl RelaySection {
    pub fn selection(&self) -> Result<RelaySelectionConfig<f64>> {
        Ok(RelaySelectionConfig::new(
            self.source_power_w,
            db_to_linear(self.snr_threshold_db),
            NoiseModel::new(self.noise_power_w)?,
        )?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    #[default]
    BruteForce,
    Pso,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::BruteForce => "brute-force",
            Solver::Pso => "pso",
        }
    }
}

impl std::str::FromStr for Solver {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute-force" => Ok(Solver::BruteForce),
            "pso" => Ok(Solver::Pso),
            other => Err(CliError::Usage(format!(
                "unknown solver {other:?} (expected brute-force or pso)"
            ))),
        }
    }
}

/// Either a fixed instance or a generator seeded per run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharingSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<InstanceGenerator>,
    #[serde(default)]
    pub solver: Solver,
}

impl SharingSection {
    pub fn validate(&self) -> Result<()> {
        if self.instance.is_some() && self.generator.is_some() {
            return Err(CliError::Usage(
                "sharing section takes either \"instance\" or \"generator\", not both".into(),
            ));
        }
        if let Some(file) = &self.instance {
            file.to_instance::<f64>()?;
        }
        Ok(())
    }

    pub fn instance(&self, seed: u64) -> Result<SharingInstance<f64>> {
        match &self.instance {
            Some(file) => Ok(file.to_instance()?),
            None => Ok(self.generator.clone().unwrap_or_default().generate(seed)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareSection {
    pub node_counts: Vec<usize>,
}

impl Default for CompareSection {
    fn default() -> Self {
        Self {
            node_counts: vec![20, 40, 60, 80, 100],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub relay: RelaySection,
    pub sharing: SharingSection,
    pub pso: PsoConfig<f64>,
    pub sim: SimConfig,
    pub compare: CompareSection,
}

impl ScenarioConfig {
    pub fn from_json(text: &str, file: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            CliError::Config {
                file: file.to_string(),
                field: (path != ".").then_some(path),
                line: Some(inner.line()),
                column: Some(inner.column()),
                message: inner.to_string(),
            }
        })?;
        cfg.validate().map_err(|e| match e {
            CliError::Model(m) => CliError::Config {
                file: file.to_string(),
                field: None,
                line: None,
                column: None,
                message: m.to_string(),
            },
            other => other,
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        self.relay.selection()?;
        self.sharing.validate()?;
        self.pso.validate()?;
        self.sim.validate()?;
        if self.compare.node_counts.is_empty() {
            return Err(CliError::Usage(
                "compare.node_counts must not be empty".into(),
            ));
        }
        Ok(())
    }

    /// Canonical JSON of the resolved configuration, defaults filled in.
    pub fn canonical_json(&self) -> String {
        let mut resolved = self.clone();
        if resolved.sharing.instance.is_none() && resolved.sharing.generator.is_none() {
            resolved.sharing.generator = Some(InstanceGenerator::default());
        }
        serde_json::to_string(&resolved).expect("config serializes")
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_all_defaults() {
        let cfg = ScenarioConfig::from_json("{}", "x.json").unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
        assert_eq!(cfg.hash().len(), 16);
    }

    #[test]
    fn hash_ignores_formatting_but_not_values() {
        let a = ScenarioConfig::from_json(r#"{"sim": {"node_count": 50}}"#, "a").unwrap();
        let b =
            ScenarioConfig::from_json("{\n  \"sim\" : { \"node_count\" : 50 }\n}", "b").unwrap();
        let c = ScenarioConfig::from_json(r#"{"sim": {"node_count": 51}}"#, "c").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        let explicit = ScenarioConfig::from_json(r#"{"sharing": {"generator": {}}}"#, "d").unwrap();
        assert_eq!(explicit.hash(), ScenarioConfig::default().hash());
    }

    #[test]
    fn unknown_field_reports_path_and_position() {
        let err =
            ScenarioConfig::from_json("{\n  \"sim\": {\n    \"nodes\": 5\n  }\n}", "bad.json")
                .unwrap_err();
        match err {
            CliError::Config { field, line, .. } => {
                assert_eq!(field.as_deref(), Some("sim.nodes"));
                assert_eq!(line, Some(3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_type_reports_field() {
        let err = ScenarioConfig::from_json(r#"{"relay": {"relay_count": "ten"}}"#, "bad.json")
            .unwrap_err();
        let rec = err.record();
        assert_eq!(rec.error, "config");
        assert_eq!(rec.field.as_deref(), Some("relay.relay_count"));
    }

    #[test]
    fn invalid_values_are_config_errors() {
        let err = ScenarioConfig::from_json(r#"{"sim": {"epoch_s": -1}}"#, "bad.json").unwrap_err();
        assert_eq!(err.kind(), "config");
    }

    #[test]
    fn instance_and_generator_conflict() {
        let doc = r#"{"sharing": {"generator": {}, "instance": {
            "secondary_links": [{"tx": [0, 0], "rx": [1, 0]}],
            "transmit_power_w": 1, "noise_power_w": 1e-3, "sinr_floor_db": 3, "bandwidth_hz": 1}}}"#;
        assert!(ScenarioConfig::from_json(doc, "x").is_err());
    }
}
