use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantile::Sample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Control,
    Treatment,
}

impl Group {
    pub fn as_str(self) -> &'static str {
        match self {
            Group::Control => "control",
            Group::Treatment => "treatment",
        }
    }
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "control" | "0" => Ok(Group::Control),
            "treatment" | "1" => Ok(Group::Treatment),
            other => Err(Error::Data(format!("unknown group label `{other}`"))),
        }
    }
}

/// How right-censored observations are replaced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "value", rename_all = "kebab-case")]
pub enum ImputationRule {
    /// Keep the censoring time as the outcome.
    AtCensoringTime,
    /// Replace with a fixed value, which must not be below the censoring time.
    Fixed(f64),
}

impl fmt::Display for ImputationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImputationRule::AtCensoringTime => f.write_str("at-censoring-time"),
            ImputationRule::Fixed(v) => write!(f, "fixed:{v}"),
        }
    }
}

/// Accepts `censor`, `at-censoring-time` and `fixed:V`.
impl FromStr for ImputationRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "censor" | "at-censoring-time" => return Ok(ImputationRule::AtCensoringTime),
            _ => {}
        }
        if let Some(v) = s.strip_prefix("fixed:") {
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::config(format!("bad imputation value `{v}`")))?;
            if !v.is_finite() {
                return Err(Error::config("imputation value must be finite"));
            }
            return Ok(ImputationRule::Fixed(v));
        }
        Err(Error::config(format!("unknown imputation rule `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImputationRecord {
    pub group: Group,
    pub original: f64,
    pub imputed: f64,
    pub rule: ImputationRule,
}

/// Paired control and treatment samples from one trial or a pool of trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialDataset {
    pub trial_id: String,
    pub control: Sample,
    pub treatment: Sample,
    pub imputation_log: Vec<ImputationRecord>,
}

impl TrialDataset {
    pub fn new(trial_id: impl Into<String>, control: Sample, treatment: Sample) -> Result<Self> {
        let trial_id = trial_id.into();
        for (group, s) in [(Group::Control, &control), (Group::Treatment, &treatment)] {
            if s.is_empty() {
                return Err(Error::Data(format!(
                    "{} group of `{trial_id}` is empty",
                    group.as_str()
                )));
            }
        }
        Ok(TrialDataset {
            trial_id,
            control,
            treatment,
            imputation_log: Vec::new(),
        })
    }

    pub fn group(&self, group: Group) -> &Sample {
        match group {
            Group::Control => &self.control,
            Group::Treatment => &self.treatment,
        }
    }

    pub fn has_censoring(&self) -> bool {
        self.control.has_censoring() || self.treatment.has_censoring()
    }

    /// Replaces every censored value per `rule` and clears the flags.
    /// Already imputed datasets come back unchanged.
    pub fn impute_censored(&self, rule: ImputationRule) -> Result<TrialDataset> {
        let mut log = self.imputation_log.clone();
        let mut impute = |group: Group, sample: &Sample| -> Result<Sample> {
            let mut values = sample.values().to_vec();
            for (v, &censored) in values.iter_mut().zip(sample.censored()) {
                if !censored {
                    continue;
                }
                let imputed = match rule {
                    ImputationRule::AtCensoringTime => *v,
                    ImputationRule::Fixed(f) if f < *v => {
                        return Err(Error::Data(format!(
                            "fixed imputation {f} is below censoring time {v}"
                        )))
                    }
                    ImputationRule::Fixed(f) => f,
                };
                log.push(ImputationRecord {
                    group,
                    original: *v,
                    imputed,
                    rule,
                });
                *v = imputed;
            }
            let n = values.len();
            Sample::with_censoring(values, vec![false; n], sample.label())
        };
        let control = impute(Group::Control, &self.control)?;
        let treatment = impute(Group::Treatment, &self.treatment)?;
        Ok(TrialDataset {
            trial_id: self.trial_id.clone(),
            control,
            treatment,
            imputation_log: log,
        })
    }
}

/// Concatenates individual observations across trials.
pub fn pool_trials(trials: &[TrialDataset]) -> Result<TrialDataset> {
    let first = trials
        .first()
        .ok_or_else(|| Error::Data("nothing to pool".into()))?;
    if trials.len() == 1 {
        return Ok(first.clone());
    }
    let concat = |group: Group| -> Result<Sample> {
        let mut values = Vec::new();
        let mut flags = Vec::new();
        let mut labels: Vec<&str> = Vec::new();
        for t in trials {
            let s = t.group(group);
            values.extend_from_slice(s.values());
            flags.extend_from_slice(s.censored());
            if !s.label().is_empty() && !labels.contains(&s.label()) {
                labels.push(s.label());
            }
        }
        Sample::with_censoring(values, flags, labels.join("+"))
    };
    let ids: Vec<&str> = trials.iter().map(|t| t.trial_id.as_str()).collect();
    Ok(TrialDataset {
        trial_id: ids.join("+"),
        control: concat(Group::Control)?,
        treatment: concat(Group::Treatment)?,
        imputation_log: trials
            .iter()
            .flat_map(|t| t.imputation_log.iter().cloned())
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn censored(v: &[f64], c: &[bool]) -> Sample {
        Sample::with_censoring(v.to_vec(), c.to_vec(), "").unwrap()
    }

    fn plain(v: &[f64]) -> Sample {
        Sample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn imputation_at_censoring_time() {
        let d = TrialDataset::new(
            "m",
            censored(&[3., 7., 7.], &[false, true, true]),
            plain(&[2., 4.]),
        )
        .unwrap();
        let out = d.impute_censored(ImputationRule::AtCensoringTime).unwrap();
        assert_eq!(out.control.values(), &[3., 7., 7.]);
        assert!(!out.has_censoring());
        assert_eq!(out.imputation_log.len(), 2);
        assert_eq!(out.imputation_log[0].imputed, 7.0);
    }

    #[test]
    fn imputation_fixed() {
        let vals = vec![20.0; 27];
        let d = TrialDataset::new("c", censored(&vals, &[true; 27]), plain(&[5.])).unwrap();
        let out = d.impute_censored(ImputationRule::Fixed(30.0)).unwrap();
        assert!(out.control.values().iter().all(|&v| v == 30.0));
        assert_eq!(out.imputation_log.len(), 27);
        assert!(d.impute_censored(ImputationRule::Fixed(10.0)).is_err());
    }

    #[test]
    fn imputation_without_censoring_and_idempotence() {
        let d = TrialDataset::new("p", plain(&[1., 2.]), plain(&[3.])).unwrap();
        let out = d.impute_censored(ImputationRule::Fixed(30.0)).unwrap();
        assert_eq!(out, d);
        assert!(out.imputation_log.is_empty());

        let c = TrialDataset::new("q", censored(&[5., 9.], &[false, true]), plain(&[1.])).unwrap();
        let once = c.impute_censored(ImputationRule::Fixed(12.0)).unwrap();
        let twice = once.impute_censored(ImputationRule::Fixed(12.0)).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn rule_parsing() {
        assert_eq!("censor".parse::<ImputationRule>().unwrap(), ImputationRule::AtCensoringTime);
        assert_eq!("fixed:30".parse::<ImputationRule>().unwrap(), ImputationRule::Fixed(30.0));
        assert!("fixed:abc".parse::<ImputationRule>().is_err());
        assert!("drop".parse::<ImputationRule>().is_err());
    }

    #[test]
    fn pooling() {
        let a = TrialDataset::new("a", plain(&[1.; 10]), plain(&[2.; 10])).unwrap();
        let b = TrialDataset::new("b", plain(&[3.; 20]), plain(&[4.; 20])).unwrap();
        assert_eq!(pool_trials(&[a.clone()]).unwrap(), a);
        let p = pool_trials(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(p.control.len(), 30);
        assert_eq!(p.treatment.len(), 30);
        assert_eq!(p.trial_id, "a+b");
        assert!(pool_trials(&[]).is_err());
    }

    #[test]
    fn empty_group_rejected() {
        assert!(TrialDataset::new("e", plain(&[]), plain(&[1.])).is_err());
    }
}
