//! Sweeps of Monte-Carlo SE estimates with deterministic seeding.

use rand::Rng;
use rayon::prelude::*;

use super::{estimate_se, simulate, Draw, TrialOutcome};
use crate::analytic::SeResult;
use crate::config::{Clustering, DuplexMode, NetworkConfig, Sweep, SweepAxis};
use crate::error::{Error, Result};
use crate::rng;

/// One MC estimate of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub value: f64,
    pub clustering: Clustering,
    pub duplex: DuplexMode,
    pub se: SeResult,
    /// Seed the trials of this row were drawn from.
    pub seed: u64,
}

/// Runs `f` on a pool of at most `threads` workers (all cores if `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::param("threads", "must be >= 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::param("threads", e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// `trials` independent drops; trial `i` uses stream `i` of `seed`, so the
/// result does not depend on the number of workers.
pub fn simulate_many(
    cfg: &NetworkConfig,
    clustering: Clustering,
    trials: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<Vec<Draw>> {
    if trials == 0 {
        return Err(Error::param("trials", "must be >= 1"));
    }
    with_threads(threads, || {
        (0..trials as u64)
            .into_par_iter()
            .map(|i| simulate(cfg, clustering, &mut rng::stream(seed, i)))
            .collect::<Result<Vec<_>>>()
    })?
}

/// Seed of sweep point `index` under `clustering`.
pub fn point_seed(master: u64, index: usize, clustering: Clustering) -> u64 {
    let lane = match clustering {
        Clustering::Disjoint => 0,
        Clustering::UserCentric => 1,
    };
    rng::stream(master, ((index as u64) << 1) | lane).random()
}

/// MC SE for every sweep value, clustering mode and duplex mode.
///
/// FD and HD rows of one point share the same drops. A capacity sweep
/// reuses one set of drops for all values, since `C` only clips the SE.
pub fn run_experiment(
    cfg: &NetworkConfig,
    sweep: &Sweep,
    clusterings: &[Clustering],
    duplexes: &[DuplexMode],
    trials: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<Vec<SweepRow>> {
    if sweep.values.is_empty() {
        return Err(Error::param("sweep", "no values"));
    }
    let mut rows = Vec::new();
    for &clustering in clusterings {
        let mut shared: Option<(u64, Vec<Draw>)> = None;
        for (index, &value) in sweep.values.iter().enumerate() {
            let point = sweep.axis.apply(cfg, value)?;
            let (seed, draws) = match (&shared, sweep.axis) {
                (Some(s), SweepAxis::Capacity) => s.clone(),
                _ => {
                    let s = point_seed(seed, if sweep.axis == SweepAxis::Capacity { 0 } else { index }, clustering);
                    (s, simulate_many(&point, clustering, trials, s, threads)?)
                }
            };
            for &duplex in duplexes {
                let outcomes: Vec<TrialOutcome> = draws.iter().map(|d| d.outcome(duplex)).collect();
                rows.push(SweepRow {
                    axis: sweep.axis,
                    value,
                    clustering,
                    duplex,
                    se: estimate_se(&outcomes, point.c_d, point.c_u, duplex)?,
                    seed,
                });
            }
            if sweep.axis == SweepAxis::Capacity && shared.is_none() {
                shared = Some((seed, draws));
            }
        }
    }
    Ok(rows)
}
