//! Declarative simulation scenarios in TOML.
//!
//! ```toml
//! [[scenario]]
//! name = "normal-shift"
//! control = "normal(10, 3)"
//! treatment = "shift(-2)"
//! n_control = 100          # n_treatment defaults to n_control
//! replications = 500
//! bootstrap = 2000         # optional, default 2000
//! alpha = 0.05             # optional
//! cutpoints = 100          # optional, default n_control
//! estimators = ["bagging", "direct", "doksum"]   # optional, all three
//! levels = [0.05, 0.5, 0.95]                     # optional, default battery levels
//! seed = 7                 # optional
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{EstimatorConfig, EstimatorKind};
use crate::error::{Error, Result};
use crate::simulation::{default_levels, SimulationReport, SimulationScenario};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    scenario: Vec<ScenarioEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioEntry {
    name: String,
    control: String,
    treatment: String,
    n_control: usize,
    n_treatment: Option<usize>,
    replications: usize,
    bootstrap: Option<usize>,
    alpha: Option<f64>,
    cutpoints: Option<usize>,
    estimators: Option<Vec<String>>,
    levels: Option<Vec<f64>>,
    seed: Option<u64>,
    note: Option<String>,
}

impl ScenarioEntry {
    fn into_scenario(self) -> Result<SimulationScenario> {
        let mut config = EstimatorConfig::default();
        if let Some(b) = self.bootstrap {
            config.bootstrap = b;
        }
        if let Some(a) = self.alpha {
            config.alpha = a;
        }
        config.cutpoints = self.cutpoints;
        if let Some(s) = self.seed {
            config.seed = s;
        }
        let estimators = match self.estimators {
            Some(names) => names
                .iter()
                .map(|n| n.parse::<EstimatorKind>())
                .collect::<Result<Vec<_>>>()?,
            None => vec![EstimatorKind::Bagging, EstimatorKind::Direct, EstimatorKind::Doksum],
        };
        let scenario = SimulationScenario {
            name: self.name,
            control: self.control.parse()?,
            treatment: self.treatment.parse()?,
            n_control: self.n_control,
            n_treatment: self.n_treatment.unwrap_or(self.n_control),
            replications: self.replications,
            levels: self.levels.unwrap_or_else(default_levels),
            estimators,
            config,
            note: self.note.unwrap_or_default(),
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

pub fn parse_scenarios(text: &str) -> Result<Vec<SimulationScenario>> {
    let file: ScenarioFile =
        toml::from_str(text).map_err(|e| Error::config(format!("scenario file: {}", e.message())))?;
    if file.scenario.is_empty() {
        return Err(Error::config("scenario file defines no [[scenario]]"));
    }
    file.scenario.into_iter().map(ScenarioEntry::into_scenario).collect()
}

pub fn load_scenarios(path: impl AsRef<Path>) -> Result<Vec<SimulationScenario>> {
    let path = path.as_ref();
    std::fs::read_to_string(path)
        .map_err(Error::from)
        .and_then(|text| parse_scenarios(&text))
        .map_err(|e| Error::InFile {
            path: path.display().to_string(),
            source: Box::new(e),
        })
}

#[derive(Serialize)]
struct ReportDocument<'a> {
    schema: &'static str,
    reports: &'a [SimulationReport],
}

pub const REPORT_SCHEMA: &str = "bqte.simulation-report/v1";

pub fn serialize_reports(reports: &[SimulationReport]) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(&ReportDocument {
        schema: REPORT_SCHEMA,
        reports,
    })?;
    out.push(b'\n');
    Ok(out)
}
