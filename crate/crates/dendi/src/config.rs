use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use dendi_core::{DendiConfig, Family, ModifierSet};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Analyze,
    Simulate,
}

/// Everything a run needs. Loadable from a JSON file; command-line flags
/// override individual fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub input_path: Option<PathBuf>,
    pub outcome_column: Option<String>,
    pub covariate_columns: Vec<String>,
    pub confounder_columns: Vec<String>,
    pub family: Family,
    pub grid_size: usize,
    pub min_node: usize,
    pub se_multiplier: f64,
    pub candidate_modifiers: ModifierSet,
    pub scenario: Option<u8>,
    pub ns: Vec<usize>,
    pub sigmas: Vec<f64>,
    pub replications: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Worker threads; `None` uses every logical core.
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let engine = DendiConfig::default();
        RunConfig {
            mode: Mode::Analyze,
            input_path: None,
            outcome_column: None,
            covariate_columns: Vec::new(),
            confounder_columns: Vec::new(),
            family: Family::GaussianIdentity,
            grid_size: engine.grid_size,
            min_node: engine.min_node,
            se_multiplier: engine.se_multiplier,
            candidate_modifiers: engine.candidate_modifiers,
            scenario: None,
            ns: vec![200, 500, 800],
            sigmas: vec![1.0, 1.5, 2.0],
            replications: 100,
            seed: 1,
            output_dir: PathBuf::from("dendi-out"),
            workers: None,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn engine(&self) -> DendiConfig {
        DendiConfig {
            grid_size: self.grid_size,
            min_node: self.min_node,
            se_multiplier: self.se_multiplier,
            candidate_modifiers: self.candidate_modifiers,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.engine().validate().map_err(|e| usage(e.to_string()))?;
        if self.workers == Some(0) {
            return Err(usage("--workers must be at least 1"));
        }
        match self.mode {
            Mode::Analyze => {
                if self.input_path.is_none() {
                    return Err(usage("analyze needs --input"));
                }
                let outcome = self
                    .outcome_column
                    .as_ref()
                    .ok_or_else(|| usage("analyze needs --outcome"))?;
                if self.covariate_columns.is_empty() {
                    return Err(usage("analyze needs at least one covariate"));
                }
                let mut seen = BTreeSet::new();
                for name in std::iter::once(outcome)
                    .chain(&self.covariate_columns)
                    .chain(&self.confounder_columns)
                {
                    if !seen.insert(name) {
                        return Err(usage(format!("column `{name}` is named more than once")));
                    }
                }
            }
            Mode::Simulate => {
                let id = self
                    .scenario
                    .ok_or_else(|| usage("simulate needs --scenario"))?;
                if !(1..=6).contains(&id) {
                    return Err(usage(format!("scenario must be 1-6, got {id}")));
                }
                if self.replications == 0 {
                    return Err(usage("--replications must be at least 1"));
                }
                if self.ns.is_empty() || self.ns.contains(&0) {
                    return Err(usage("--n needs one or more positive sample sizes"));
                }
                if self.sigmas.is_empty()
                    || self.sigmas.iter().any(|s| !(*s > 0.0) || !s.is_finite())
                {
                    return Err(usage("--sigma needs one or more positive values"));
                }
            }
        }
        Ok(())
    }
}
