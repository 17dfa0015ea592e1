//! Dataset ingestion, censoring imputation, pooling, scenario files and
//! curve serialization.

mod csv_io;
mod curve_io;
mod dataset;
mod scenario_file;
mod svg;

pub use csv_io::{load_csv, read_trial_csv, write_trial_csv, CsvOptions};
pub use curve_io::{
    parse_curve_json, parse_curve_set_json, serialize_curve, serialize_curve_set, serialize_summary,
    CurveFormat, CURVE_SCHEMA, SUMMARY_SCHEMA,
};
pub use dataset::{pool_trials, Group, ImputationRecord, ImputationRule, TrialDataset};
pub use scenario_file::{load_scenarios, parse_scenarios, serialize_reports, REPORT_SCHEMA};
pub use svg::render_svg;
