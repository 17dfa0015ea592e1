//! Back-transformed quantile treatment effects.
//!
//! Given outcome samples from a control and a treatment group, estimates
//! `BQTE(x) = G^-1(F(x)) - x`, the quantile treatment effect re-indexed by
//! the control outcome value `x`, together with percentile bootstrap
//! intervals. Also provides tail-average bounds (UTBQTE/LTBQTE), overall
//! mean-difference and ratio-of-means summaries, and a Monte Carlo harness
//! for checking bias, RMSE and interval coverage against known truth.
//!
//! ```no_run
//! use bqte::{estimate_bqte, evaluation_grid, load_csv, relative_curve, CsvOptions, EstimatorConfig, ImputationRule};
//!
//! let data = load_csv("data/trial.csv", &CsvOptions::default())?
//!     .impute_censored(ImputationRule::AtCensoringTime)?;
//! let config = EstimatorConfig::default();
//! let grid = evaluation_grid(&data, &config)?;
//! let days = estimate_bqte(&data, &config, &grid)?;
//! let percent = relative_curve(&days)?;
//! # Ok::<(), bqte::Error>(())
//! ```

pub mod config;
pub mod curve;
pub mod data;
pub mod error;
pub mod estimator;
pub mod quantile;
pub mod resample;
pub mod simulation;
pub mod summary;
pub mod tails;

pub use config::{EstimatorConfig, EstimatorKind, GridPolicy};
pub use curve::{CurveKind, CurvePoint, EffectCurve, Provenance, Scale};
pub use data::{
    load_csv, load_scenarios, parse_curve_json, parse_curve_set_json, parse_scenarios, pool_trials,
    read_trial_csv, serialize_curve, serialize_curve_set, serialize_reports, serialize_summary,
    CsvOptions, CurveFormat, ImputationRule, TrialDataset,
};
pub use error::{Error, ErrorKind, Result};
pub use estimator::{
    cutpoint_levels, doksum_point, estimate_bqte, evaluation_grid, paired_quantile_grid,
    piecewise_bqte, relative_curve, resolve_grid, valid_range, Knots,
};
pub use quantile::{Sample, SortedSample};
pub use resample::{bootstrap_pairs, BootstrapPairs, PairedResample};
pub use simulation::{
    default_battery, run_scenario, true_bqte, Law, SimulationReport, SimulationScenario, TreatmentMap,
};
pub use summary::{summarize, Interval, SummaryEffects};
pub use tails::{estimate_tail_curves, ltbqte_point, utbqte_point, TailCurves};
