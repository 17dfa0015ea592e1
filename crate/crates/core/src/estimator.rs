//! BQTE estimation: paired cut-point quantiles, piecewise-linear
//! interpolation, bootstrap aggregation and percentile intervals.
//!
//! Stored values are treatment minus control, so a treatment that shortens
//! durations has a negative BQTE.

use crate::config::{EstimatorConfig, EstimatorKind, GridPolicy, MIN_CUTPOINTS};
use crate::curve::{CurveKind, CurvePoint, EffectCurve, Provenance, Scale};
use crate::data::TrialDataset;
use crate::error::{Error, Result};
use crate::quantile::{
    ecdf_sorted, generalized_inverse_sorted, mean_sorted, quantile_sorted, Sample, SortedSample,
};
use crate::resample::{map_indexed, BootstrapPairs, ResampleScratch};

/// Quantile levels `i / (k + 1)` for `i = 1..=k`.
pub fn cutpoint_levels(k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::ZeroCutpoints);
    }
    let denom = (k + 1) as f64;
    Ok((1..=k).map(|i| i as f64 / denom).collect())
}

/// Control and treatment quantiles at the `k` cut-point levels.
pub fn paired_quantile_grid(control: &Sample, treatment: &Sample, k: usize) -> Result<Vec<(f64, f64)>> {
    let levels = cutpoint_levels(k)?;
    let c = control.sorted()?;
    let t = treatment.sorted()?;
    Ok(levels
        .iter()
        .map(|&p| (quantile_sorted(c.as_slice(), p), quantile_sorted(t.as_slice(), p)))
        .collect())
}

/// Piecewise-linear map from control quantiles to treatment quantiles.
///
/// Runs of equal control quantiles are merged into one knot carrying the
/// mean of their treatment quantiles, so `xs` is strictly increasing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Knots {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Knots {
    /// Builds knots from `(x_i, y_i)` pairs with nondecreasing `x_i`.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptySample);
        }
        if pairs.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::Data("non-finite interpolation knot".into()));
        }
        if pairs.windows(2).any(|w| w[1].0 < w[0].0) {
            return Err(Error::UnorderedKnots);
        }
        let mut knots = Knots::default();
        knots.collapse(pairs.iter().copied());
        Ok(knots)
    }

    /// Recomputes knots from sorted samples at `levels`, reusing buffers.
    pub(crate) fn rebuild(&mut self, control: &[f64], treatment: &[f64], levels: &[f64]) {
        let pairs = levels
            .iter()
            .map(|&p| (quantile_sorted(control, p), quantile_sorted(treatment, p)));
        self.collapse(pairs);
    }

    fn collapse(&mut self, pairs: impl Iterator<Item = (f64, f64)>) {
        self.xs.clear();
        self.ys.clear();
        let mut run: Option<(f64, f64, usize)> = None;
        for (x, y) in pairs {
            run = match run {
                Some((rx, sum, n)) if rx == x => Some((rx, sum + y, n + 1)),
                Some((rx, sum, n)) => {
                    self.push_run(rx, sum, n);
                    Some((x, y, 1))
                }
                None => Some((x, y, 1)),
            };
        }
        if let Some((rx, sum, n)) = run {
            self.push_run(rx, sum, n);
        }
    }

    fn push_run(&mut self, x: f64, sum: f64, n: usize) {
        self.xs.push(x);
        self.ys.push(if n == 1 { sum } else { sum / n as f64 });
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn support(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// BQTE at `x`; refuses points outside the knot support.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let (low, high) = self.support();
        if !(x >= low && x <= high) {
            return Err(Error::OutsideSupport { x, low, high });
        }
        Ok(self.eval_clamped(x))
    }

    /// BQTE at `x`. Outside the support the treatment quantile is held at
    /// its end knot, i.e. `y_1 - x` below and `y_K - x` above.
    pub fn eval_clamped(&self, x: f64) -> f64 {
        let last = self.xs.len() - 1;
        let i = self.xs.partition_point(|&v| v <= x);
        if i == 0 {
            return self.ys[0] - x;
        }
        let i = i - 1;
        if i == last || self.xs[i] == x {
            return self.ys[i] - x;
        }
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        y0 + (x - x0) / (x1 - x0) * (y1 - y0) - x
    }
}

/// BQTE at `x` by linear interpolation over a paired quantile grid.
pub fn piecewise_bqte(grid: &[(f64, f64)], x: f64) -> Result<f64> {
    Knots::from_pairs(grid)?.eval(x)
}

/// Control quantiles at levels `5/k` and `1 - 5/k`.
pub fn valid_range(control: &Sample, k: usize) -> Result<(f64, f64)> {
    let sorted = control.sorted()?;
    valid_range_sorted(sorted.as_slice(), k)
}

pub(crate) fn valid_range_sorted(control: &[f64], k: usize) -> Result<(f64, f64)> {
    let (lo, hi) = validity_levels(k)?;
    Ok((quantile_sorted(control, lo), quantile_sorted(control, hi)))
}

/// Quantile levels bounding the validity range for `k` cut points.
pub fn validity_levels(k: usize) -> Result<(f64, f64)> {
    if k < MIN_CUTPOINTS {
        return Err(Error::DegenerateRange(k));
    }
    let lo = 5.0 / k as f64;
    Ok((lo, 1.0 - lo))
}

/// Expands a grid policy against the control sample and its valid range.
pub fn resolve_grid(control: &Sample, policy: &GridPolicy, range: (f64, f64)) -> Result<Vec<f64>> {
    let (low, high) = range;
    let grid = match policy {
        GridPolicy::Observed => {
            let mut v: Vec<f64> = control
                .sorted()?
                .into_vec()
                .into_iter()
                .filter(|&x| x >= low && x <= high)
                .collect();
            v.dedup();
            v
        }
        GridPolicy::Uniform { points } => {
            let n = *points;
            if n == 0 {
                return Err(Error::config("uniform grid needs at least one point"));
            }
            if n == 1 || low == high {
                vec![low]
            } else {
                let step = (high - low) / (n - 1) as f64;
                let mut v: Vec<f64> = (0..n - 1).map(|i| low + step * i as f64).collect();
                v.push(high);
                v.dedup();
                v
            }
        }
        GridPolicy::Explicit { points } => points.clone(),
    };
    check_grid(&grid, range)?;
    Ok(grid)
}

/// Grid for `dataset` under `config`'s cut-point count and grid policy.
pub fn evaluation_grid(dataset: &TrialDataset, config: &EstimatorConfig) -> Result<Vec<f64>> {
    let k = config.cutpoints_for(dataset.control.len());
    let range = valid_range(&dataset.control, k)?;
    resolve_grid(&dataset.control, &config.grid, range)
}

pub(crate) fn check_grid(grid: &[f64], (low, high): (f64, f64)) -> Result<()> {
    for (i, &x) in grid.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::config(format!("non-finite grid point {x}")));
        }
        if i > 0 && x <= grid[i - 1] {
            return Err(Error::UnorderedGrid(x));
        }
        if x < low || x > high {
            return Err(Error::OutsideValidRange { x, low, high });
        }
    }
    Ok(())
}

/// Plug-in value `G^-1(F(x)) - x` on sorted samples. A level of zero maps
/// to the treatment minimum.
pub(crate) fn doksum_sorted(control: &[f64], treatment: &[f64], x: f64) -> f64 {
    let p = ecdf_sorted(control, x);
    generalized_inverse_sorted(treatment, p) - x
}

/// Doksum's plug-in estimate at `x` from the raw samples.
pub fn doksum_point(control: &Sample, treatment: &Sample, x: f64) -> Result<f64> {
    let c = control.sorted()?;
    let t = treatment.sorted()?;
    let p = c.ecdf(x);
    Ok(t.generalized_inverse(p)? - x)
}

/// Validated inputs shared by the curve estimators.
#[derive(Debug, Clone)]
pub(crate) struct Prepared {
    pub control: Vec<f64>,
    pub treatment: Vec<f64>,
    pub cutpoints: usize,
    pub levels: Vec<f64>,
    pub range: (f64, f64),
}

impl Prepared {
    pub fn new(dataset: &TrialDataset, config: &EstimatorConfig, grid: &[f64]) -> Result<Self> {
        config.validate()?;
        let control = SortedSample::from_values(dataset.control.values().to_vec())?.into_vec();
        let treatment = SortedSample::from_values(dataset.treatment.values().to_vec())?.into_vec();
        let cutpoints = config.cutpoints_for(control.len());
        let range = valid_range_sorted(&control, cutpoints)?;
        check_grid(grid, range)?;
        Ok(Prepared {
            levels: cutpoint_levels(cutpoints)?,
            control,
            treatment,
            cutpoints,
            range,
        })
    }

    pub fn pairs(&self, config: &EstimatorConfig) -> BootstrapPairs {
        BootstrapPairs::from_sorted(&self.control, &self.treatment, config.seed, config.bootstrap)
    }

    pub fn provenance(&self, dataset: &TrialDataset, config: &EstimatorConfig) -> Provenance {
        Provenance {
            config: config.clone(),
            trial_id: dataset.trial_id.clone(),
            control_label: dataset.control.label().to_string(),
            treatment_label: dataset.treatment.label().to_string(),
            control_n: self.control.len(),
            treatment_n: self.treatment.len(),
            cutpoints: self.cutpoints,
            control_mean: mean_sorted(&self.control),
            treatment_mean: mean_sorted(&self.treatment),
            dropped_replicates: Vec::new(),
            warnings: config.small_bootstrap_warning().into_iter().collect(),
        }
    }
}

/// Bootstrap values at each grid point, replicate-major.
#[derive(Debug, Clone)]
pub(crate) struct ReplicateMatrix {
    pub width: usize,
    pub values: Vec<f64>,
}

impl ReplicateMatrix {
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().skip(j).step_by(self.width).copied().collect()
    }
}

#[derive(Default)]
struct EvalScratch {
    resample: ResampleScratch,
    knots: Knots,
}

/// Piecewise BQTE (and optionally the Doksum plug-in) at each grid point
/// for every replicate.
pub(crate) fn replicate_matrix(
    pairs: &BootstrapPairs,
    levels: &[f64],
    grid: &[f64],
    with_doksum: bool,
    workers: Option<usize>,
) -> Result<(ReplicateMatrix, Option<ReplicateMatrix>)> {
    let g = grid.len();
    let rows = map_indexed(pairs.len(), workers, EvalScratch::default, |s, b| {
        pairs.draw_into(b, &mut s.resample);
        let pair = &s.resample.pair;
        s.knots.rebuild(&pair.control, &pair.treatment, levels);
        let mut row = Vec::with_capacity(if with_doksum { 2 * g } else { g });
        row.extend(grid.iter().map(|&x| s.knots.eval_clamped(x)));
        if with_doksum {
            row.extend(grid.iter().map(|&x| doksum_sorted(&pair.control, &pair.treatment, x)));
        }
        row
    })?;
    let mut bqte = Vec::with_capacity(pairs.len() * g);
    let mut doksum = Vec::with_capacity(if with_doksum { pairs.len() * g } else { 0 });
    for row in rows {
        bqte.extend_from_slice(&row[..g]);
        if with_doksum {
            doksum.extend_from_slice(&row[g..]);
        }
    }
    Ok((
        ReplicateMatrix { width: g, values: bqte },
        with_doksum.then_some(ReplicateMatrix { width: g, values: doksum }),
    ))
}

/// Mean and percentile interval of one bootstrap column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ColumnSummary {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// `values` is consumed (sorted in place). Empty input has no summary.
pub(crate) fn summarize_column(mut values: Vec<f64>, alpha: f64) -> Option<ColumnSummary> {
    if values.is_empty() {
        return None;
    }
    // mean in replicate order, before sorting
    let raw = values.iter().sum::<f64>() / values.len() as f64;
    crate::quantile::sort_values(&mut values);
    let (min, max) = (values[0], values[values.len() - 1]);
    Some(ColumnSummary {
        mean: raw.clamp(min, max),
        ci_low: quantile_sorted(&values, alpha / 2.0),
        ci_high: quantile_sorted(&values, 1.0 - alpha / 2.0),
    })
}

/// Absolute-scale BQTE curve over `grid`.
pub fn estimate_bqte(dataset: &TrialDataset, config: &EstimatorConfig, grid: &[f64]) -> Result<EffectCurve> {
    let prep = Prepared::new(dataset, config, grid)?;
    let doksum = config.estimator == EstimatorKind::Doksum;
    let (matrix, doksum_matrix) =
        replicate_matrix(&prep.pairs(config), &prep.levels, grid, doksum, config.workers)?;
    let boot = doksum_matrix.as_ref().unwrap_or(&matrix);

    let mut observed = Knots::default();
    observed.rebuild(&prep.control, &prep.treatment, &prep.levels);

    let points = grid
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            let s = summarize_column(boot.column(j), config.alpha).expect("bootstrap count >= 2");
            let estimate = match config.estimator {
                EstimatorKind::Bagging => s.mean,
                // grid lies inside the valid range, hence inside the knot support
                EstimatorKind::Direct => observed.eval_clamped(x),
                EstimatorKind::Doksum => doksum_sorted(&prep.control, &prep.treatment, x),
            };
            CurvePoint {
                x,
                estimate,
                ci_low: s.ci_low,
                ci_high: s.ci_high,
            }
        })
        .collect();

    let provenance = prep.provenance(dataset, config);
    Ok(EffectCurve {
        kind: CurveKind::Bqte,
        scale: Scale::Absolute,
        alpha: config.alpha,
        valid_range: prep.range,
        reference: Some(provenance.treatment_mean - provenance.control_mean),
        points,
        provenance,
    })
}

/// Divides every estimate and bound by its control outcome value.
pub fn relative_curve(curve: &EffectCurve) -> Result<EffectCurve> {
    if curve.scale != Scale::Absolute {
        return Err(Error::AlreadyRelative);
    }
    if let Some(p) = curve.points.iter().find(|p| p.x <= 0.0) {
        return Err(Error::NonPositiveOutcome(p.x));
    }
    let points = curve
        .points
        .iter()
        .map(|p| CurvePoint {
            x: p.x,
            estimate: p.estimate / p.x,
            ci_low: p.ci_low / p.x,
            ci_high: p.ci_high / p.x,
        })
        .collect();
    let prov = &curve.provenance;
    let reference = (prov.control_mean != 0.0).then(|| prov.treatment_mean / prov.control_mean - 1.0);
    Ok(EffectCurve {
        scale: Scale::Relative,
        reference,
        points,
        ..curve.clone()
    })
}
