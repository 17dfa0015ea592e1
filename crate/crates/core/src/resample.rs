//! Paired bootstrap resampling with per-replicate random streams.
//!
//! Replicate `b` is drawn from a ChaCha8 generator seeded with the master
//! seed and switched to stream `b`. The control resample is drawn first,
//! then the treatment resample, each as `n` uniform indices into the
//! group. Nothing else touches that generator, so a replicate's content
//! depends only on `(seed, b)` and not on how replicates are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::EstimatorConfig;
use crate::data::TrialDataset;
use crate::error::{Error, Result};
use crate::quantile::SortedSample;

/// Generator for replicate `index` under `seed`.
pub fn replicate_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// SplitMix64 finalizer over `(seed, domain, index)`, used to give
/// independent seeds to nested stages (data draws vs. bootstrap).
pub fn derive_seed(seed: u64, domain: u64, index: u64) -> u64 {
    let mut z = seed
        ^ domain.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One paired replicate. Both resamples are returned in sorted order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PairedResample {
    pub control: Vec<f64>,
    pub treatment: Vec<f64>,
}

/// Reusable buffers for drawing replicates.
#[derive(Debug, Default)]
pub struct ResampleScratch {
    counts: Vec<u32>,
    pub pair: PairedResample,
}

/// Draws a sorted with-replacement resample of `sorted` into `out`.
/// Counting draws per index keeps this O(n) since the source is sorted.
fn resample_sorted_into(sorted: &[f64], rng: &mut ChaCha8Rng, counts: &mut Vec<u32>, out: &mut Vec<f64>) {
    let n = sorted.len();
    counts.clear();
    counts.resize(n, 0);
    for _ in 0..n {
        counts[rng.random_range(0..n)] += 1;
    }
    out.clear();
    for (&v, &c) in sorted.iter().zip(counts.iter()) {
        out.extend(std::iter::repeat_n(v, c as usize));
    }
}

/// Source of paired replicates for one dataset.
#[derive(Debug, Clone)]
pub struct BootstrapPairs {
    control: Vec<f64>,
    treatment: Vec<f64>,
    seed: u64,
    count: usize,
}

impl BootstrapPairs {
    pub fn from_sorted(control: &[f64], treatment: &[f64], seed: u64, count: usize) -> Self {
        debug_assert!(control.windows(2).all(|w| w[0] <= w[1]));
        debug_assert!(treatment.windows(2).all(|w| w[0] <= w[1]));
        BootstrapPairs {
            control: control.to_vec(),
            treatment: treatment.to_vec(),
            seed,
            count,
        }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn control(&self) -> &[f64] {
        &self.control
    }

    pub fn treatment(&self) -> &[f64] {
        &self.treatment
    }

    /// Fills `scratch.pair` with replicate `index`.
    pub fn draw_into(&self, index: usize, scratch: &mut ResampleScratch) {
        let mut rng = replicate_rng(self.seed, index as u64);
        let ResampleScratch { counts, pair } = scratch;
        resample_sorted_into(&self.control, &mut rng, counts, &mut pair.control);
        resample_sorted_into(&self.treatment, &mut rng, counts, &mut pair.treatment);
    }

    pub fn replicate(&self, index: usize) -> PairedResample {
        let mut scratch = ResampleScratch::default();
        self.draw_into(index, &mut scratch);
        scratch.pair
    }

    pub fn iter(&self) -> impl Iterator<Item = PairedResample> + '_ {
        (0..self.count).map(|b| self.replicate(b))
    }

    /// Applies `f` to every replicate, possibly in parallel, and returns the
    /// results in replicate order.
    pub fn map<T, F>(&self, workers: Option<usize>, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&PairedResample) -> T + Sync,
    {
        map_indexed(self.count, workers, ResampleScratch::default, |scratch, b| {
            self.draw_into(b, scratch);
            f(&scratch.pair)
        })
    }
}

/// The replicate stream for a dataset under `config` (B = `config.bootstrap`).
pub fn bootstrap_pairs(dataset: &TrialDataset, config: &EstimatorConfig) -> Result<BootstrapPairs> {
    let control = SortedSample::from_values(dataset.control.values().to_vec())?;
    let treatment = SortedSample::from_values(dataset.treatment.values().to_vec())?;
    Ok(BootstrapPairs {
        control: control.into_vec(),
        treatment: treatment.into_vec(),
        seed: config.seed,
        count: config.bootstrap,
    })
}

/// Runs `f(scratch, i)` for `i` in `0..count` and collects in index order.
/// `workers = Some(1)` stays on the calling thread.
pub fn map_indexed<S, T, I, F>(count: usize, workers: Option<usize>, init: I, f: F) -> Result<Vec<T>>
where
    T: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, usize) -> T + Sync + Send,
{
    match workers {
        Some(0) => Err(Error::config("worker count must be positive")),
        Some(1) => {
            let mut scratch = init();
            Ok((0..count).map(|i| f(&mut scratch, i)).collect())
        }
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(|| (0..count).into_par_iter().map_init(&init, &f).collect()))
        }
        None => Ok((0..count).into_par_iter().map_init(&init, &f).collect()),
    }
}
