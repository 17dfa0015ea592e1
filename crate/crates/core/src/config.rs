use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BOOTSTRAP: usize = 2000;
pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_SEED: u64 = 20231022;

/// Smallest cut-point count with a non-degenerate validity range.
pub const MIN_CUTPOINTS: usize = 11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    /// Mean of the bootstrap distribution.
    Bagging,
    /// Piecewise-linear estimate on the observed samples.
    Direct,
    /// Empirical-CDF / generalized-inverse plug-in, no interpolation.
    Doksum,
}

impl EstimatorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorKind::Bagging => "bagging",
            EstimatorKind::Direct => "direct",
            EstimatorKind::Doksum => "doksum",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bagging" => Ok(EstimatorKind::Bagging),
            "direct" => Ok(EstimatorKind::Direct),
            "doksum" => Ok(EstimatorKind::Doksum),
            other => Err(Error::config(format!("unknown estimator `{other}`"))),
        }
    }
}

/// Where along the control-outcome axis a curve is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "lowercase")]
pub enum GridPolicy {
    /// Unique observed control values inside the valid range.
    Observed,
    /// Evenly spaced points spanning the valid range, endpoints included.
    Uniform { points: usize },
    Explicit { points: Vec<f64> },
}

impl fmt::Display for GridPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridPolicy::Observed => f.write_str("observed"),
            GridPolicy::Uniform { points } => write!(f, "uniform:{points}"),
            GridPolicy::Explicit { points } => {
                f.write_str("list:")?;
                for (i, p) in points.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}

/// Accepts `observed`, `uniform:N` and `list:x1,x2,...`.
impl FromStr for GridPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("observed") {
            return Ok(GridPolicy::Observed);
        }
        let (head, tail) = s
            .split_once(':')
            .ok_or_else(|| Error::config(format!("unknown grid policy `{s}`")))?;
        match head.trim().to_ascii_lowercase().as_str() {
            "uniform" => {
                let points: usize = tail
                    .trim()
                    .parse()
                    .map_err(|_| Error::config(format!("bad uniform grid size `{tail}`")))?;
                if points == 0 {
                    return Err(Error::config("uniform grid needs at least one point"));
                }
                Ok(GridPolicy::Uniform { points })
            }
            "list" => {
                let points = tail
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .ok()
                            .filter(|v| v.is_finite())
                            .ok_or_else(|| Error::config(format!("bad grid value `{t}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(GridPolicy::Explicit { points })
            }
            other => Err(Error::config(format!("unknown grid policy `{other}`"))),
        }
    }
}

/// Everything that determines an estimate, echoed into every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub bootstrap: usize,
    /// `None` means one cut point per control observation.
    pub cutpoints: Option<usize>,
    pub alpha: f64,
    pub estimator: EstimatorKind,
    pub seed: u64,
    pub grid: GridPolicy,
    /// Worker threads for the bootstrap; `None` uses the global pool.
    /// Results do not depend on it, so it is not part of the echo.
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            bootstrap: DEFAULT_BOOTSTRAP,
            cutpoints: None,
            alpha: DEFAULT_ALPHA,
            estimator: EstimatorKind::Bagging,
            seed: DEFAULT_SEED,
            grid: GridPolicy::Observed,
            workers: None,
        }
    }
}

impl EstimatorConfig {
    pub fn with_bootstrap(mut self, b: usize) -> Self {
        self.bootstrap = b;
        self
    }

    pub fn with_cutpoints(mut self, k: usize) -> Self {
        self.cutpoints = Some(k);
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_estimator(mut self, kind: EstimatorKind) -> Self {
        self.estimator = kind;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_grid(mut self, grid: GridPolicy) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    /// Checks the settings needed by any estimation path (B >= 2 for CIs).
    pub fn validate(&self) -> Result<()> {
        if self.bootstrap < 2 {
            return Err(Error::config(format!(
                "bootstrap count must be at least 2, got {}",
                self.bootstrap
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.cutpoints == Some(0) {
            return Err(Error::ZeroCutpoints);
        }
        if self.workers == Some(0) {
            return Err(Error::config("worker count must be positive"));
        }
        Ok(())
    }

    pub fn cutpoints_for(&self, control_len: usize) -> usize {
        self.cutpoints.unwrap_or(control_len)
    }

    /// Warning text when too few replicates fall beyond each CI bound.
    pub fn small_bootstrap_warning(&self) -> Option<String> {
        let tail = self.bootstrap as f64 * self.alpha / 2.0;
        (tail < 5.0).then(|| {
            format!(
                "only {tail:.1} bootstrap replicates expected beyond each CI bound (B = {}, alpha = {})",
                self.bootstrap, self.alpha
            )
        })
    }
}
