//! Single-number comparators: mean difference and ratio of means.

use serde::{Deserialize, Serialize};

use crate::config::EstimatorConfig;
use crate::data::TrialDataset;
use crate::error::{Error, Result};
use crate::estimator::summarize_column;
use crate::quantile::{mean_sorted, SortedSample};
use crate::resample::BootstrapPairs;

/// Point estimate with a percentile interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryEffects {
    /// Treatment mean minus control mean.
    pub ate: Interval,
    /// Treatment mean over control mean.
    pub rom: Interval,
    /// `1 - rom`; its interval is the mirrored RoM interval.
    pub relative_reduction: Interval,
    pub control_mean: f64,
    pub treatment_mean: f64,
    pub alpha: f64,
    pub bootstrap: usize,
    pub seed: u64,
    pub trial_id: String,
}

/// Means computed over sorted values, the same summation order the tail
/// estimators use.
fn group_means(control: &[f64], treatment: &[f64]) -> (f64, f64) {
    (mean_sorted(control), mean_sorted(treatment))
}

/// ATE and RoM with percentile bootstrap intervals drawn from the shared
/// replicate stream (same seed gives the same resamples as the curves).
pub fn summarize(dataset: &TrialDataset, config: &EstimatorConfig) -> Result<SummaryEffects> {
    config.validate()?;
    let control = SortedSample::from_values(dataset.control.values().to_vec())?.into_vec();
    let treatment = SortedSample::from_values(dataset.treatment.values().to_vec())?.into_vec();
    let (mc, mt) = group_means(&control, &treatment);
    if mc == 0.0 {
        return Err(Error::RomUndefined);
    }
    let pairs = BootstrapPairs::from_sorted(&control, &treatment, config.seed, config.bootstrap);
    let reps = pairs.map(config.workers, |r| group_means(&r.control, &r.treatment))?;
    if reps.iter().any(|&(c, _)| c == 0.0) {
        return Err(Error::RomUndefined);
    }
    let ate_col: Vec<f64> = reps.iter().map(|&(c, t)| t - c).collect();
    let rom_col: Vec<f64> = reps.iter().map(|&(c, t)| t / c).collect();
    let ate_s = summarize_column(ate_col, config.alpha).expect("bootstrap count >= 2");
    let rom_s = summarize_column(rom_col, config.alpha).expect("bootstrap count >= 2");

    let rom = Interval {
        estimate: mt / mc,
        ci_low: rom_s.ci_low,
        ci_high: rom_s.ci_high,
    };
    Ok(SummaryEffects {
        ate: Interval {
            estimate: mt - mc,
            ci_low: ate_s.ci_low,
            ci_high: ate_s.ci_high,
        },
        rom,
        relative_reduction: Interval {
            estimate: 1.0 - rom.estimate,
            ci_low: 1.0 - rom.ci_high,
            ci_high: 1.0 - rom.ci_low,
        },
        control_mean: mc,
        treatment_mean: mt,
        alpha: config.alpha,
        bootstrap: config.bootstrap,
        seed: config.seed,
        trial_id: dataset.trial_id.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantile::Sample;
    use crate::tails::ltbqte_point;

    fn dataset(c: &[f64], t: &[f64]) -> TrialDataset {
        TrialDataset::new("s", Sample::new(c.to_vec()).unwrap(), Sample::new(t.to_vec()).unwrap()).unwrap()
    }

    fn cfg() -> EstimatorConfig {
        EstimatorConfig::default().with_bootstrap(500)
    }

    #[test]
    fn identical_groups() {
        let c = [2., 4., 4., 5., 9.];
        let s = summarize(&dataset(&c, &c), &cfg()).unwrap();
        assert_eq!(s.ate.estimate, 0.0);
        assert_eq!(s.rom.estimate, 1.0);
        assert_eq!(s.relative_reduction.estimate, 0.0);
        assert!(s.ate.ci_low <= 0.0 && s.ate.ci_high >= 0.0);
    }

    #[test]
    fn reduction_mirrors_rom() {
        let s = summarize(&dataset(&[10., 12., 8., 11.], &[6., 7., 5., 5.5]), &cfg()).unwrap();
        assert_eq!(s.relative_reduction.estimate, 1.0 - s.rom.estimate);
        assert_eq!(s.relative_reduction.ci_low, 1.0 - s.rom.ci_high);
        assert!(s.rom.estimate > 0.0);
        assert!(s.ate.estimate < 0.0);
    }

    #[test]
    fn zero_control_mean() {
        assert!(matches!(
            summarize(&dataset(&[0., 0.], &[1., 2.]), &cfg()),
            Err(Error::RomUndefined)
        ));
    }

    #[test]
    fn equivariance() {
        let c = [3., 5., 6., 8., 13.];
        let t = [2., 3., 3., 5., 9.];
        let base = summarize(&dataset(&c, &t), &cfg()).unwrap();
        let shift = |v: &[f64]| v.iter().map(|x| x + 7.0).collect::<Vec<_>>();
        let scale = |v: &[f64]| v.iter().map(|x| x * 4.0).collect::<Vec<_>>();
        let shifted = summarize(&dataset(&shift(&c), &shift(&t)), &cfg()).unwrap();
        assert!((shifted.ate.estimate - base.ate.estimate).abs() < 1e-12);
        let scaled = summarize(&dataset(&scale(&c), &scale(&t)), &cfg()).unwrap();
        assert_eq!(scaled.ate.estimate, 4.0 * base.ate.estimate);
        assert_eq!(scaled.rom.estimate, base.rom.estimate);
    }

    #[test]
    fn ate_matches_full_lower_tail() {
        let c = [1.3, 2.7, 0.4, 5.5, 3.3, 2.2];
        let t = [0.9, 1.1, 4.25, 2.0];
        let d = dataset(&c, &t);
        let s = summarize(&d, &cfg()).unwrap();
        assert_eq!(ltbqte_point(&d.control, &d.treatment, 5.5).unwrap(), s.ate.estimate);
    }
}
