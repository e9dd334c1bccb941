use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crn_core::sim::Policy;

use crate::config::{ScenarioConfig, Solver};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    SelectRelay,
    Share,
    Simulate,
    Sweep,
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SelectRelay => "select-relay",
            Command::Share => "share",
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::Compare => "compare",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Usage(format!(
                "unknown format {other:?} (expected csv or json)"
            ))),
        }
    }
}

/// Command-line settings for the sharing solver, applied over the scenario
/// file before it is hashed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolverOverrides {
    pub solver: Option<Solver>,
    pub swarm_size: Option<usize>,
    pub iterations: Option<usize>,
    pub inertia: Option<f64>,
    pub cognitive: Option<f64>,
    pub social: Option<f64>,
    pub velocity_clamp: Option<f64>,
    pub penalty: Option<f64>,
}

impl SolverOverrides {
    pub fn apply(&self, cfg: &mut ScenarioConfig) -> Result<()> {
        let pso = &mut cfg.pso;
        if let Some(v) = self.solver {
            cfg.sharing.solver = v;
        }
        if let Some(v) = self.swarm_size {
            pso.swarm_size = v;
        }
        if let Some(v) = self.iterations {
            pso.iterations = v;
        }
        if let Some(v) = self.inertia {
            pso.inertia = v;
        }
        if let Some(v) = self.cognitive {
            pso.cognitive = v;
        }
        if let Some(v) = self.social {
            pso.social = v;
        }
        if let Some(v) = self.velocity_clamp {
            pso.velocity_clamp = v;
        }
        if self.penalty.is_some() {
            pso.infeasibility_penalty = self.penalty;
        }
        cfg.pso.validate()?;
        Ok(())
    }
}

/// Everything a run needs besides the scenario file contents.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: Command,
    pub config_path: Option<PathBuf>,
    pub seeds: Vec<u64>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub links: Option<Vec<usize>>,
    pub gamma_db: Option<Vec<f64>>,
    pub policies: Option<Vec<Policy>>,
    pub trace_path: Option<PathBuf>,
    pub solver: SolverOverrides,
}

impl RunManifest {
    pub fn new(command: Command, seeds: Vec<u64>) -> Result<Self> {
        if seeds.is_empty() {
            return Err(CliError::Usage("the seed list must not be empty".into()));
        }
        Ok(Self {
            command,
            config_path: None,
            seeds,
            output_path: None,
            format: Format::Csv,
            links: None,
            gamma_db: None,
            policies: None,
            trace_path: None,
            solver: SolverOverrides::default(),
        })
    }

    /// Scenario file (or defaults) with the command-line overrides applied.
    pub fn load_config(&self) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config_path {
            Some(p) => ScenarioConfig::load(p)?,
            None => ScenarioConfig::default(),
        };
        self.solver.apply(&mut cfg)?;
        Ok(cfg)
    }
}

/// `--seeds N` expands to `0..N`; `--seed-list` is taken verbatim. Exactly
/// one of the two must be given.
pub fn resolve_seeds(count: Option<u64>, list: Option<Vec<u64>>) -> Result<Vec<u64>> {
    match (count, list) {
        (Some(_), Some(_)) => Err(CliError::Usage(
            "give either --seeds or --seed-list, not both".into(),
        )),
        (None, None) => Err(CliError::Usage(
            "a seed is required: pass --seeds N or --seed-list a,b,c".into(),
        )),
        (Some(0), None) => Err(CliError::Usage("--seeds must be at least 1".into())),
        (Some(n), None) => Ok((0..n).collect()),
        (None, Some(list)) if list.is_empty() => {
            Err(CliError::Usage("--seed-list must not be empty".into()))
        }
        (None, Some(list)) => Ok(list),
    }
}
