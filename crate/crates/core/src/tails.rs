//! Upper and lower tail back-transformed effects: differences of
//! tail-conditional means above (below) matched thresholds `x` in control
//! and `G^-1(F(x))` in treatment. Tail membership is inclusive.

use crate::config::{EstimatorConfig, EstimatorKind};
use crate::curve::{CurveKind, CurvePoint, EffectCurve, Scale};
use crate::data::TrialDataset;
use crate::error::{Error, Result};
use crate::estimator::{relative_curve, summarize_column, Prepared};
use crate::quantile::{ecdf_sorted, generalized_inverse_sorted, mean_sorted, Sample};
use crate::resample::{map_indexed, ResampleScratch};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tail {
    Upper,
    Lower,
}

fn tail_sorted(control: &[f64], treatment: &[f64], x: f64, tail: Tail) -> Option<f64> {
    let p = ecdf_sorted(control, x);
    if p <= 0.0 {
        // no control value at or below x: the lower tail is empty, and the
        // treatment threshold is undefined
        return None;
    }
    let t = generalized_inverse_sorted(treatment, p);
    let (c_tail, t_tail) = match tail {
        Tail::Upper => (
            &control[control.partition_point(|&v| v < x)..],
            &treatment[treatment.partition_point(|&v| v < t)..],
        ),
        Tail::Lower => (
            &control[..control.partition_point(|&v| v <= x)],
            &treatment[..treatment.partition_point(|&v| v <= t)],
        ),
    };
    if c_tail.is_empty() || t_tail.is_empty() {
        return None;
    }
    Some(mean_sorted(t_tail) - mean_sorted(c_tail))
}

/// Upper-tail effect on sorted samples; `None` when a tail is empty.
pub fn utbqte_sorted(control: &[f64], treatment: &[f64], x: f64) -> Option<f64> {
    tail_sorted(control, treatment, x, Tail::Upper)
}

/// Lower-tail effect on sorted samples; `None` when a tail is empty.
pub fn ltbqte_sorted(control: &[f64], treatment: &[f64], x: f64) -> Option<f64> {
    tail_sorted(control, treatment, x, Tail::Lower)
}

/// Mean of treatment values `>= G^-1(F(x))` minus mean of control values `>= x`.
pub fn utbqte_point(control: &Sample, treatment: &Sample, x: f64) -> Result<f64> {
    let (c, t) = (control.sorted()?, treatment.sorted()?);
    utbqte_sorted(c.as_slice(), t.as_slice(), x).ok_or(Error::EmptyTail(x))
}

/// Mean of treatment values `<= G^-1(F(x))` minus mean of control values `<= x`.
pub fn ltbqte_point(control: &Sample, treatment: &Sample, x: f64) -> Result<f64> {
    let (c, t) = (control.sorted()?, treatment.sorted()?);
    ltbqte_sorted(c.as_slice(), t.as_slice(), x).ok_or(Error::EmptyTail(x))
}

/// Upper and lower tail curves over one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TailCurves {
    pub upper: EffectCurve,
    pub lower: EffectCurve,
}

impl TailCurves {
    pub fn relative(&self) -> Result<TailCurves> {
        Ok(TailCurves {
            upper: relative_curve(&self.upper)?,
            lower: relative_curve(&self.lower)?,
        })
    }
}

/// Absolute-scale UTBQTE and LTBQTE curves with percentile intervals.
///
/// Uses the same replicate stream as [`crate::estimate_bqte`]. Replicates
/// whose resample leaves a tail empty at some `x` are left out at that
/// point and counted in `provenance.dropped_replicates`. The Doksum
/// setting has no separate meaning here and behaves like `direct`.
pub fn estimate_tail_curves(
    dataset: &TrialDataset,
    config: &EstimatorConfig,
    grid: &[f64],
) -> Result<TailCurves> {
    let prep = Prepared::new(dataset, config, grid)?;
    let pairs = prep.pairs(config);
    let g = grid.len();
    let rows = map_indexed(pairs.len(), config.workers, ResampleScratch::default, |s, b| {
        pairs.draw_into(b, s);
        let (c, t) = (&s.pair.control, &s.pair.treatment);
        let mut row = Vec::with_capacity(2 * g);
        row.extend(grid.iter().map(|&x| utbqte_sorted(c, t, x)));
        row.extend(grid.iter().map(|&x| ltbqte_sorted(c, t, x)));
        row
    })?;

    let build = |kind: CurveKind, offset: usize| -> Result<EffectCurve> {
        let mut dropped = Vec::with_capacity(g);
        let mut points = Vec::with_capacity(g);
        for (j, &x) in grid.iter().enumerate() {
            let column: Vec<f64> = rows.iter().filter_map(|r| r[offset + j]).collect();
            dropped.push(rows.len() - column.len());
            let summary = summarize_column(column, config.alpha).ok_or(Error::EmptyTail(x))?;
            let observed = match kind {
                CurveKind::Utbqte => utbqte_sorted(&prep.control, &prep.treatment, x),
                _ => ltbqte_sorted(&prep.control, &prep.treatment, x),
            }
            .ok_or(Error::EmptyTail(x))?;
            let estimate = match config.estimator {
                EstimatorKind::Bagging => summary.mean,
                EstimatorKind::Direct | EstimatorKind::Doksum => observed,
            };
            points.push(CurvePoint {
                x,
                estimate,
                ci_low: summary.ci_low,
                ci_high: summary.ci_high,
            });
        }
        let mut provenance = prep.provenance(dataset, config);
        if dropped.iter().any(|&d| d > 0) {
            provenance.dropped_replicates = dropped;
        }
        Ok(EffectCurve {
            kind,
            scale: Scale::Absolute,
            alpha: config.alpha,
            valid_range: prep.range,
            reference: Some(provenance.treatment_mean - provenance.control_mean),
            points,
            provenance,
        })
    };

    Ok(TailCurves {
        upper: build(CurveKind::Utbqte, 0)?,
        lower: build(CurveKind::Ltbqte, g)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[f64]) -> Sample {
        Sample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn point_examples() {
        let x = s(&[1., 2., 3., 4., 5.]);
        let y = s(&[2., 4., 6., 8., 10.]);
        assert_eq!(utbqte_point(&x, &y, 3.0).unwrap(), 4.0);
        assert_eq!(ltbqte_point(&x, &y, 3.0).unwrap(), 2.0);
        assert_eq!(utbqte_point(&x, &x, 2.0).unwrap(), 0.0);
        assert_eq!(ltbqte_point(&x, &x, 4.0).unwrap(), 0.0);
    }

    #[test]
    fn full_sample_lower_tail_is_ate() {
        let x = s(&[3., 1., 4., 1., 5., 9., 2., 6.]);
        let y = s(&[2., 7., 1., 8., 2.]);
        let ate = y.mean().unwrap() - x.mean().unwrap();
        assert_eq!(ltbqte_point(&x, &y, 9.0).unwrap(), ate);
    }

    #[test]
    fn empty_tails() {
        let x = s(&[1., 2., 3.]);
        let y = s(&[1., 2., 3.]);
        assert!(matches!(utbqte_point(&x, &y, 3.5), Err(Error::EmptyTail(_))));
        assert!(matches!(ltbqte_point(&x, &y, 0.5), Err(Error::EmptyTail(_))));
    }

    #[test]
    fn ties_at_threshold_included() {
        let x = s(&[1., 2., 2., 2., 5.]);
        let y = s(&[1., 1., 3., 3., 3.]);
        // F(2) = 0.8, G^-1(0.8) = 3, upper tails {2,2,2,5} and {3,3,3}
        assert_eq!(utbqte_point(&x, &y, 2.0).unwrap(), 3.0 - 11.0 / 4.0);
    }

    #[test]
    fn curves_for_shift_and_identity() {
        let c: Vec<f64> = (1..=40).map(f64::from).collect();
        let t: Vec<f64> = c.iter().map(|v| v + 3.0).collect();
        let cfg = EstimatorConfig::default().with_bootstrap(300);
        let same = TrialDataset::new("same", s(&c), s(&c)).unwrap();
        let grid = crate::estimator::evaluation_grid(&same, &cfg).unwrap();
        let tails = estimate_tail_curves(&same, &cfg, &grid).unwrap();
        for p in tails.upper.points.iter().chain(&tails.lower.points) {
            assert!(p.ci_low <= 0.0 && p.ci_high >= 0.0, "{p:?}");
        }

        let shifted = TrialDataset::new("shift", s(&c), s(&t)).unwrap();
        let direct = cfg.clone().with_estimator(EstimatorKind::Direct);
        let tails = estimate_tail_curves(&shifted, &direct, &grid).unwrap();
        for p in tails.upper.points.iter().chain(&tails.lower.points) {
            assert!((p.estimate - 3.0).abs() < 1e-12, "{p:?}");
        }
        let rel = tails.relative().unwrap();
        assert_eq!(rel.upper.scale, Scale::Relative);
    }
}
