use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::EstimatorConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Bqte,
    Utbqte,
    Ltbqte,
}

impl CurveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveKind::Bqte => "bqte",
            CurveKind::Utbqte => "utbqte",
            CurveKind::Ltbqte => "ltbqte",
        }
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// Outcome units, treatment minus control.
    Absolute,
    /// Absolute effect divided by the control outcome value, as a proportion.
    Relative,
}

impl Scale {
    pub fn as_str(self) -> &'static str {
        match self {
            Scale::Absolute => "absolute",
            Scale::Relative => "relative",
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Where a curve came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config: EstimatorConfig,
    pub trial_id: String,
    pub control_label: String,
    pub treatment_label: String,
    pub control_n: usize,
    pub treatment_n: usize,
    pub cutpoints: usize,
    pub control_mean: f64,
    pub treatment_mean: f64,
    /// Replicates left out per grid point (empty tails); all zero for BQTE.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dropped_replicates: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// An effect estimated over a grid of control-outcome values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectCurve {
    pub kind: CurveKind,
    pub scale: Scale,
    pub alpha: f64,
    pub valid_range: (f64, f64),
    /// Overall comparator drawn as a reference line: ATE on the absolute
    /// scale, RoM - 1 on the relative scale.
    pub reference: Option<f64>,
    pub points: Vec<CurvePoint>,
    pub provenance: Provenance,
}

impl EffectCurve {
    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.x)
    }

    pub fn estimates(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.estimate)
    }

    pub fn y_label(&self) -> String {
        let name = match self.kind {
            CurveKind::Bqte => "BQTE",
            CurveKind::Utbqte => "UTBQTE",
            CurveKind::Ltbqte => "LTBQTE",
        };
        match self.scale {
            Scale::Absolute => format!("{name} (treatment - control, outcome units)"),
            Scale::Relative => format!("{name} relative to control outcome (%)"),
        }
    }
}
