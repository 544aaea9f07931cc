//! Independent runs with derived seeds.
//!
//! Run `i` of an ensemble with master seed `m` uses the seed
//! [`run_seed`]`(m, i)`: the `(i + 1)`-th output of a SplitMix64 generator
//! whose state starts at `m`. The derivation is part of the output contract
//! (changing it changes every ensemble result) and is versioned by
//! [`SEED_DERIVATION_VERSION`].

use std::ops::Range;

use rayon::prelude::*;

use super::{run, ModelParams, ProcessError, RunTrace};

pub const SEED_DERIVATION_VERSION: u32 = 1;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of run `run_index` in an ensemble with `master_seed`.
pub fn run_seed(master_seed: u64, run_index: u64) -> u64 {
    splitmix64_finalize(master_seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(run_index.wrapping_add(1))))
}

/// Runs `indices` and maps each trace through `reduce` as soon as it is
/// produced. Results come back in index order whatever the scheduling.
pub fn ensemble_map_range<R, F>(
    params: &ModelParams,
    indices: Range<u64>,
    master_seed: u64,
    parallel: bool,
    reduce: F,
) -> Result<Vec<R>, ProcessError>
where
    R: Send,
    F: Fn(u64, RunTrace) -> R + Sync,
{
    params.validate()?;
    let one = |i: u64| -> Result<R, ProcessError> {
        let p = ModelParams {
            seed: run_seed(master_seed, i),
            ..params.clone()
        };
        run(&p).map(|trace| reduce(i, trace))
    };
    if parallel {
        indices.into_par_iter().map(one).collect()
    } else {
        indices.map(one).collect()
    }
}

/// [`ensemble_map_range`] over runs `0..n_runs`.
pub fn ensemble_map<R, F>(
    params: &ModelParams,
    n_runs: u64,
    master_seed: u64,
    parallel: bool,
    reduce: F,
) -> Result<Vec<R>, ProcessError>
where
    R: Send,
    F: Fn(u64, RunTrace) -> R + Sync,
{
    if n_runs == 0 {
        return Err(ProcessError::Config("an ensemble needs at least one run".into()));
    }
    ensemble_map_range(params, 0..n_runs, master_seed, parallel, reduce)
}

/// Full traces of runs `0..n_runs`; see [`ensemble_map`] for large runs.
pub fn ensemble(
    params: &ModelParams,
    n_runs: u64,
    master_seed: u64,
    parallel: bool,
) -> Result<Vec<RunTrace>, ProcessError> {
    ensemble_map(params, n_runs, master_seed, parallel, |_, trace| trace)
}
