//! Monte Carlo harness with known truth: repeated trials drawn from
//! closed-form laws, each analysed by every requested estimator on the same
//! data, aggregated into bias, RMSE and CI coverage per grid point.
//!
//! Replication `r` draws its data from a generator seeded with
//! `derive_seed(seed, 0, r)` and bootstraps with seed
//! `derive_seed(seed, 1, r)`, so a report depends only on the scenario.

mod law;

use std::time::Instant;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use law::{Law, TreatmentMap};

use crate::config::{EstimatorConfig, EstimatorKind, GridPolicy};
use crate::error::{Error, Result};
use crate::estimator::{cutpoint_levels, doksum_sorted, replicate_matrix, summarize_column, validity_levels, Knots};
use crate::quantile::sort_values;
use crate::resample::{derive_seed, map_indexed, BootstrapPairs};

const DATA_DOMAIN: u64 = 0;
const BOOTSTRAP_DOMAIN: u64 = 1;

/// Label written into reports built from [`default_battery`].
pub const BATTERY_NOTE: &str =
    "default battery: illustrative laws and sizes, not the parameters of any published study";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationScenario {
    pub name: String,
    pub control: Law,
    pub treatment: TreatmentMap,
    pub n_control: usize,
    pub n_treatment: usize,
    pub replications: usize,
    /// Control-law quantile levels at which the curve is evaluated.
    pub levels: Vec<f64>,
    pub estimators: Vec<EstimatorKind>,
    /// Bootstrap count, alpha, cut points and seed. Grid policy and
    /// estimator kind are ignored; `levels` and `estimators` replace them.
    pub config: EstimatorConfig,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl SimulationScenario {
    pub fn validate(&self) -> Result<()> {
        self.control.validate()?;
        self.treatment.validate_for(&self.control)?;
        self.config.validate()?;
        if self.n_control == 0 || self.n_treatment == 0 {
            return Err(Error::config("sample sizes must be positive"));
        }
        validity_levels(self.cutpoints())?;
        if self.replications == 0 {
            return Err(Error::config("replications must be positive"));
        }
        if self.estimators.is_empty() {
            return Err(Error::config("no estimators requested"));
        }
        if self.levels.is_empty() {
            return Err(Error::config("no evaluation levels"));
        }
        for (i, &p) in self.levels.iter().enumerate() {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::LevelOutOfRange(p));
            }
            if i > 0 && p <= self.levels[i - 1] {
                return Err(Error::config("levels must be strictly increasing"));
            }
        }
        Ok(())
    }

    pub fn cutpoints(&self) -> usize {
        self.config.cutpoints_for(self.n_control)
    }

    /// Evaluation points on the control-outcome axis.
    pub fn grid(&self) -> Vec<f64> {
        self.levels.iter().map(|&p| self.control.quantile(p)).collect()
    }
}

/// Closed-form `G^-1(F(x)) - x` for the scenario's laws.
pub fn true_bqte(scenario: &SimulationScenario, x: f64) -> Result<f64> {
    scenario.treatment.validate_for(&scenario.control)?;
    let (lo, hi) = scenario.control.support();
    if !(x > lo && x < hi) {
        return Err(Error::Unsupported(format!(
            "x = {x} is not interior to the support of {}",
            scenario.control
        )));
    }
    match scenario.treatment {
        TreatmentMap::Independent { law } => {
            let p = scenario.control.cdf(x);
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::Unsupported(format!(
                    "F({x}) = {p} is numerically at the edge of (0, 1)"
                )));
            }
            Ok(law.quantile(p) - x)
        }
        map => Ok((map.monotone().expect("monotone"))(x) - x),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub level: f64,
    pub x: f64,
    pub truth: f64,
    pub mean_estimate: f64,
    pub bias: f64,
    pub rmse: f64,
    pub coverage: f64,
    /// Whether `level` lies within `[5/K, 1 - 5/K]`.
    pub inside_validity: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmReport {
    pub estimator: EstimatorKind,
    pub points: Vec<PointReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub scenario: SimulationScenario,
    pub validity_levels: (f64, f64),
    pub arms: Vec<ArmReport>,
    /// Wall-clock time; kept out of the JSON so reports are reproducible.
    #[serde(skip)]
    pub runtime_seconds: f64,
}

impl SimulationReport {
    pub fn arm(&self, kind: EstimatorKind) -> Option<&ArmReport> {
        self.arms.iter().find(|a| a.estimator == kind)
    }
}

/// One replication's estimates and coverage flags, per arm and grid point.
type Replication = Vec<(Vec<f64>, Vec<bool>)>;

fn draw(rng: &mut ChaCha8Rng, n: usize, quantile: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| quantile(rng.sample::<f64, _>(Open01))).collect();
    sort_values(&mut v);
    v
}

fn run_replication(scenario: &SimulationScenario, grid: &[f64], levels: &[f64], r: usize) -> Result<Replication> {
    let seed = scenario.config.seed;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, DATA_DOMAIN, r as u64));
    let control_law = scenario.control;
    let control = draw(&mut rng, scenario.n_control, |u| control_law.quantile(u));
    let treatment = draw(&mut rng, scenario.n_treatment, |u| {
        scenario.treatment.treatment_quantile(&control_law, u)
    });

    let want_doksum = scenario.estimators.contains(&EstimatorKind::Doksum);
    let pairs = BootstrapPairs::from_sorted(
        &control,
        &treatment,
        derive_seed(seed, BOOTSTRAP_DOMAIN, r as u64),
        scenario.config.bootstrap,
    );
    let (piecewise, doksum) = replicate_matrix(&pairs, levels, grid, want_doksum, Some(1))?;

    let mut observed = Knots::default();
    observed.rebuild(&control, &treatment, levels);

    let alpha = scenario.config.alpha;
    let truths: Vec<f64> = grid.iter().map(|&x| true_bqte(scenario, x)).collect::<Result<_>>()?;
    let arms = scenario
        .estimators
        .iter()
        .map(|&kind| {
            let matrix = match kind {
                EstimatorKind::Doksum => doksum.as_ref().expect("doksum requested"),
                _ => &piecewise,
            };
            grid.iter()
                .enumerate()
                .map(|(j, &x)| {
                    let s = summarize_column(matrix.column(j), alpha).expect("bootstrap count >= 2");
                    let est = match kind {
                        EstimatorKind::Bagging => s.mean,
                        // points outside the sample's support hold the end quantile
                        EstimatorKind::Direct => observed.eval_clamped(x),
                        EstimatorKind::Doksum => doksum_sorted(&control, &treatment, x),
                    };
                    (est, s.ci_low <= truths[j] && truths[j] <= s.ci_high)
                })
                .unzip()
        })
        .collect();
    Ok(arms)
}

/// Runs every replication and aggregates per estimator and grid point.
///
/// Unlike [`crate::estimate_bqte`], grid points are fixed quantiles of the
/// true control law and may fall outside a given sample's valid range;
/// such points are evaluated anyway (holding the end treatment quantile
/// beyond the knot support) and flagged by `inside_validity`.
pub fn run_scenario(scenario: &SimulationScenario) -> Result<SimulationReport> {
    scenario.validate()?;
    let start = Instant::now();
    let k = scenario.cutpoints();
    let levels = cutpoint_levels(k)?;
    let (v_lo, v_hi) = validity_levels(k)?;
    let grid = scenario.grid();
    let truths: Vec<f64> = grid.iter().map(|&x| true_bqte(scenario, x)).collect::<Result<_>>()?;

    let reps = map_indexed(
        scenario.replications,
        scenario.config.workers,
        || (),
        |_, r| run_replication(scenario, &grid, &levels, r),
    )?
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let r_count = reps.len() as f64;
    let arms = scenario
        .estimators
        .iter()
        .enumerate()
        .map(|(a, &estimator)| {
            let points = grid
                .iter()
                .enumerate()
                .map(|(j, &x)| {
                    let truth = truths[j];
                    let (mut sum, mut sum_err, mut sum_sq, mut covered) = (0.0, 0.0, 0.0, 0usize);
                    for rep in &reps {
                        let est = rep[a].0[j];
                        let err = est - truth;
                        sum += est;
                        sum_err += err;
                        sum_sq += err * err;
                        covered += rep[a].1[j] as usize;
                    }
                    let level = scenario.levels[j];
                    PointReport {
                        level,
                        x,
                        truth,
                        mean_estimate: sum / r_count,
                        bias: sum_err / r_count,
                        rmse: (sum_sq / r_count).sqrt(),
                        coverage: covered as f64 / r_count,
                        inside_validity: level >= v_lo && level <= v_hi,
                    }
                })
                .collect();
            ArmReport { estimator, points }
        })
        .collect();

    Ok(SimulationReport {
        scenario: scenario.clone(),
        validity_levels: (v_lo, v_hi),
        arms,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Levels used by the default battery: dense tails plus deciles.
pub fn default_levels() -> Vec<f64> {
    let mut v = vec![0.01, 0.02, 0.03];
    v.extend((1..=19).map(|i| i as f64 * 0.05));
    v.extend([0.97, 0.98, 0.99]);
    v
}

fn battery_scenario(name: &str, control: Law, treatment: TreatmentMap) -> SimulationScenario {
    SimulationScenario {
        name: name.into(),
        control,
        treatment,
        n_control: 100,
        n_treatment: 100,
        replications: 500,
        levels: default_levels(),
        estimators: vec![EstimatorKind::Bagging, EstimatorKind::Direct, EstimatorKind::Doksum],
        config: EstimatorConfig::default().with_grid(GridPolicy::Observed),
        note: BATTERY_NOTE.into(),
    }
}

/// Symmetric, skewed, heavy-tailed and null scenarios.
pub fn default_battery() -> Vec<SimulationScenario> {
    vec![
        battery_scenario(
            "normal-shift",
            Law::Normal { mean: 10.0, sd: 3.0 },
            TreatmentMap::Shift { c: -2.0 },
        ),
        battery_scenario(
            "lognormal-scale",
            Law::LogNormal { mu: 2.0, sigma: 0.6 },
            TreatmentMap::Scale { a: 0.6 },
        ),
        battery_scenario(
            "exponential-independent",
            Law::Exponential { rate: 1.0 },
            TreatmentMap::Independent {
                law: Law::Exponential { rate: 2.0 },
            },
        ),
        battery_scenario(
            "no-effect",
            Law::LogNormal { mu: 2.0, sigma: 0.6 },
            TreatmentMap::Shift { c: 0.0 },
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(control: Law, treatment: TreatmentMap) -> SimulationScenario {
        SimulationScenario {
            name: "t".into(),
            control,
            treatment,
            n_control: 40,
            n_treatment: 40,
            replications: 20,
            levels: vec![0.2, 0.5, 0.8],
            estimators: vec![EstimatorKind::Bagging, EstimatorKind::Direct, EstimatorKind::Doksum],
            config: EstimatorConfig::default().with_bootstrap(100).with_seed(5),
            note: String::new(),
        }
    }

    #[test]
    fn truth_examples() {
        let s = scenario(Law::Normal { mean: 0.0, sd: 1.0 }, TreatmentMap::Shift { c: 2.0 });
        for x in [-1.5, 0.0, 2.3] {
            assert_eq!(true_bqte(&s, x).unwrap(), 2.0);
        }
        let s = scenario(Law::LogNormal { mu: 0.0, sigma: 1.0 }, TreatmentMap::Scale { a: 0.6 });
        assert!((true_bqte(&s, 10.0).unwrap() + 4.0).abs() < 1e-12);
        assert!(true_bqte(&s, -1.0).is_err());
    }

    /// Numeric inversion of the treatment CDF by bisection, independent of
    /// the closed-form quantile.
    fn bisect_quantile(law: &Law, p: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while law.cdf(hi) < p {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if law.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn exponential_independent_truth() {
        // F(x) = 1 - e^-x and G^-1(p) = -ln(1 - p) / 2, so BQTE(x) = -x / 2
        let treat = Law::Exponential { rate: 2.0 };
        let s = scenario(Law::Exponential { rate: 1.0 }, TreatmentMap::Independent { law: treat });
        for x in [0.1, 0.7, 1.0, 2.5, 4.0] {
            let closed = true_bqte(&s, x).unwrap();
            assert!((closed + x / 2.0).abs() < 1e-12, "{x} {closed}");
            let numeric = bisect_quantile(&treat, s.control.cdf(x)) - x;
            assert!((closed - numeric).abs() < 1e-9, "{x} {numeric}");
        }
    }

    #[test]
    fn report_is_deterministic_and_consistent() {
        let s = scenario(Law::LogNormal { mu: 1.0, sigma: 0.5 }, TreatmentMap::Scale { a: 0.7 });
        let a = run_scenario(&s).unwrap();
        let mut s_par = s.clone();
        s_par.config.workers = Some(3);
        let b = run_scenario(&s_par).unwrap();
        assert_eq!(a.arms, b.arms);
        assert_eq!(a.arms.len(), 3);
        for arm in &a.arms {
            for p in &arm.points {
                assert!((0.0..=1.0).contains(&p.coverage));
                assert!(p.rmse >= p.bias.abs() * (1.0 - 1e-12), "{p:?}");
            }
        }
    }

    #[test]
    fn validation_errors() {
        let mut s = scenario(Law::Normal { mean: 0.0, sd: 1.0 }, TreatmentMap::Shift { c: 1.0 });
        s.n_control = 8;
        assert!(matches!(s.validate(), Err(Error::DegenerateRange(8))));
        let mut s = scenario(Law::Normal { mean: 0.0, sd: 1.0 }, TreatmentMap::Shift { c: 1.0 });
        s.levels = vec![0.5, 0.4];
        assert!(s.validate().is_err());
        let s = scenario(
            Law::Normal { mean: 0.0, sd: 1.0 },
            TreatmentMap::Power { coef: 1.0, exponent: 2.0 },
        );
        assert!(matches!(s.validate(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn default_battery_is_valid() {
        for s in default_battery() {
            s.validate().unwrap();
        }
    }
}
