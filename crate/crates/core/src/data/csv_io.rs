//! Individual-patient CSV files: one row per patient with a group column,
//! a duration column and an optional censoring flag.
//!
//! Files laid out differently (other column names, `arm`/`days` etc.) are
//! read by pointing [`CsvOptions`] at their columns.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::data::dataset::{Group, TrialDataset};
use crate::error::{Error, Result};
use crate::quantile::Sample;

#[derive(Debug, Clone, PartialEq)]
pub struct CsvOptions {
    pub group_column: String,
    pub duration_column: String,
    pub censored_column: String,
    /// Accept zero durations; negative values are always rejected.
    pub allow_zero: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            group_column: "group".into(),
            duration_column: "duration".into(),
            censored_column: "censored".into(),
            allow_zero: false,
        }
    }
}

fn parse_flag(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "" | "0" | "false" | "no" | "f" | "n" => Some(false),
        "1" | "true" | "yes" | "t" | "y" => Some(true),
        _ => None,
    }
}

/// Reads a dataset from CSV text.
pub fn read_trial_csv<R: Read>(reader: R, trial_id: &str, opts: &CsvOptions) -> Result<TrialDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let group_idx = find(&opts.group_column).ok_or_else(|| Error::MissingColumn(opts.group_column.clone()))?;
    let dur_idx =
        find(&opts.duration_column).ok_or_else(|| Error::MissingColumn(opts.duration_column.clone()))?;
    let cens_idx = find(&opts.censored_column);

    let mut groups: [(Vec<f64>, Vec<bool>); 2] = Default::default();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let row_err = |message: String| Error::Row { line, message };
        let field = |i: usize| record.get(i).unwrap_or("");

        let group: Group = field(group_idx)
            .parse()
            .map_err(|e: Error| row_err(e.to_string()))?;
        let raw = field(dur_idx);
        let duration: f64 = raw
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| row_err(format!("unparseable duration `{raw}`")))?;
        if duration < 0.0 {
            return Err(row_err(format!("negative duration {duration}")));
        }
        if duration == 0.0 && !opts.allow_zero {
            return Err(row_err("zero duration (pass allow_zero to accept)".into()));
        }
        let censored = match cens_idx {
            Some(i) => parse_flag(field(i))
                .ok_or_else(|| row_err(format!("bad censoring flag `{}`", field(i))))?,
            None => false,
        };
        let slot = &mut groups[group as usize];
        slot.0.push(duration);
        slot.1.push(censored);
    }
    let [(cv, cf), (tv, tf)] = groups;
    TrialDataset::new(
        trial_id,
        Sample::with_censoring(cv, cf, "control")?,
        Sample::with_censoring(tv, tf, "treatment")?,
    )
}

/// Reads a dataset from a CSV file; the trial id is the file stem.
pub fn load_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<TrialDataset> {
    let path = path.as_ref();
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trial".into());
    File::open(path)
        .map_err(Error::from)
        .and_then(|f| read_trial_csv(f, &id, opts))
        .map_err(|e| Error::InFile {
            path: path.display().to_string(),
            source: Box::new(e),
        })
}

/// Writes `group,duration,censored` rows, control first.
pub fn write_trial_csv<W: Write>(dataset: &TrialDataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["group", "duration", "censored"])?;
    for group in [Group::Control, Group::Treatment] {
        let s = dataset.group(group);
        for (v, c) in s.values().iter().zip(s.censored()) {
            w.write_record([group.as_str(), &v.to_string(), if *c { "1" } else { "0" }])?;
        }
    }
    w.flush()?;
    Ok(())
}
