//! Monte Carlo batches and the school-size sweep.
//!
//! Trials are the unit of parallelism. Trial k of a batch draws all of
//! its randomness from stream k of the batch seed, fixed before any
//! worker starts, and results are collected back in trial order, so a
//! batch is bit-identical no matter how many worker threads run it (one
//! included). A failed trial (numerical divergence) is reported alongside
//! the batch instead of aborting it; statistics are computed over the
//! trials that completed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::metrics::{classify_record, Classification};
use crate::noise::NoiseSource;
use crate::params::{SimParams, Strategy};
use crate::predation::{predator_spawn, run_predation};
use crate::school::generate_school;
use crate::survival::{average_living_time, TrialRecord};

/// Metric-recording cadence used for batch trials, in steps. Snapshots
/// exist to drive the pattern classifier; a fraction of the step count
/// is plenty.
pub const MC_RECORD_EVERY: usize = 25;

/// Reduced view of one completed trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSummary {
    pub trial: usize,
    pub p_eaten_final: f64,
    pub avg_living_time: f64,
    pub n_eaten: usize,
    pub pattern: Classification,
}

/// One trial that did not finish, with the error text.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialFailure {
    pub trial: usize,
    pub error: String,
}

/// Outcome of a batch: per-trial summaries for the trials that completed
/// plus the failures, both in trial order.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialBatch {
    pub summaries: Vec<TrialSummary>,
    pub failures: Vec<TrialFailure>,
}

/// Run trial `trial` of the batch keyed by `seed`: form the school, drop
/// in the predator, run the pursuit. A standalone run is trial 0.
pub fn run_trial(
    params: &SimParams,
    seed: u64,
    trial: u64,
    record_every: usize,
    record_frames: bool,
) -> Result<TrialRecord, SimError> {
    let mut src = NoiseSource::for_trial(seed, trial);
    let school = generate_school(params, &mut src)?;
    let predator = predator_spawn(&school, params, &mut src);
    run_predation(school, predator, params, &mut src, record_every, record_frames)
}

fn summarize(trial: usize, rec: &TrialRecord, params: &SimParams) -> TrialSummary {
    TrialSummary {
        trial,
        p_eaten_final: rec.p_eaten_final(),
        avg_living_time: average_living_time(rec),
        n_eaten: rec.n_eaten(),
        pattern: classify_record(rec, params),
    }
}

/// Run `n_trials` independent trials of `params` keyed by `base_seed`,
/// in parallel on the ambient rayon pool.
pub fn run_trials(params: &SimParams, n_trials: usize, base_seed: u64) -> TrialBatch {
    let results: Vec<Result<TrialSummary, TrialFailure>> = (0..n_trials)
        .into_par_iter()
        .map(|k| {
            run_trial(params, base_seed, k as u64, MC_RECORD_EVERY, false)
                .map(|rec| summarize(k, &rec, params))
                .map_err(|e| TrialFailure {
                    trial: k,
                    error: e.to_string(),
                })
        })
        .collect();

    let mut summaries = Vec::with_capacity(n_trials);
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(s) => summaries.push(s),
            Err(f) => failures.push(f),
        }
    }
    TrialBatch {
        summaries,
        failures,
    }
}

/// Run `f` under a rayon pool restricted to `jobs` workers, or on the
/// ambient pool when `jobs` is `None`. Results do not depend on the
/// choice; this only bounds concurrency.
pub fn install_worker_limit<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match jobs {
        None => f(),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .expect("building a rayon pool")
            .install(f),
    }
}

/// Aggregate statistics for one school size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n_prey: usize,
    pub strategy: Strategy,
    /// Trials that completed and entered the statistics.
    pub n_trials: usize,
    pub p_eaten_mean: f64,
    pub p_eaten_std: f64,
    pub p_eaten_min: f64,
    pub p_eaten_max: f64,
    pub p_eaten_q25: f64,
    pub p_eaten_q50: f64,
    pub p_eaten_q75: f64,
    pub t_alive_mean: f64,
    pub t_alive_std: f64,
    pub n_eaten_mean: f64,
}

/// One failed trial inside a sweep, tagged by school size.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    pub n_prey: usize,
    pub trial: usize,
    pub error: String,
}

/// Result of a school-size sweep, one row per requested size in request
/// order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub failures: Vec<SweepFailure>,
}

/// Sweep the school size: one batch of `n_trials` per entry of
/// `n_values`, all from `base_params` with only `n_prey` replaced.
/// Every batch reuses `base_seed`; trial seeds never depend on worker
/// scheduling, so the whole table is reproducible.
pub fn sweep_school_size(
    base_params: &SimParams,
    n_values: &[usize],
    n_trials: usize,
    base_seed: u64,
) -> SweepTable {
    let mut rows = Vec::with_capacity(n_values.len());
    let mut failures = Vec::new();
    for &n in n_values {
        let mut params = base_params.clone();
        params.n_prey = n;
        let batch = run_trials(&params, n_trials, base_seed);
        for f in batch.failures {
            failures.push(SweepFailure {
                n_prey: n,
                trial: f.trial,
                error: f.error,
            });
        }
        rows.push(row_from_batch(&params, &batch.summaries));
    }
    SweepTable { rows, failures }
}

fn row_from_batch(params: &SimParams, summaries: &[TrialSummary]) -> SweepRow {
    let p: Vec<f64> = summaries.iter().map(|s| s.p_eaten_final).collect();
    let t: Vec<f64> = summaries.iter().map(|s| s.avg_living_time).collect();
    let eaten: Vec<f64> = summaries.iter().map(|s| s.n_eaten as f64).collect();

    let p_mean = mean(&p);
    let t_mean = mean(&t);
    let mut sorted = p.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("eaten fractions are finite"));

    SweepRow {
        n_prey: params.n_prey,
        strategy: params.strategy,
        n_trials: summaries.len(),
        p_eaten_mean: p_mean,
        p_eaten_std: sample_std(&p, p_mean),
        p_eaten_min: sorted.first().copied().unwrap_or(0.0),
        p_eaten_max: sorted.last().copied().unwrap_or(0.0),
        p_eaten_q25: quantile(&sorted, 0.25),
        p_eaten_q50: quantile(&sorted, 0.5),
        p_eaten_q75: quantile(&sorted, 0.75),
        t_alive_mean: t_mean,
        t_alive_std: sample_std(&t, t_mean),
        n_eaten_mean: mean(&eaten),
    }
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n - 1 divisor); zero for fewer than two
/// samples.
pub(crate) fn sample_std(xs: &[f64], mean: f64) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

/// Linearly interpolated quantile of an ascending slice (the convention
/// where the k-th order statistic sits at rank (n-1)q).
pub(crate) fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}
