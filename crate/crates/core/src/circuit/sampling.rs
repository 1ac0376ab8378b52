//! Seeded shot sampling.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng`). Shots are split into
//! fixed shards of [`SHARD_SHOTS`]; shard `i` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` switched to stream `i`. Shards may run on
//! any number of threads and are merged in index order, so counts depend only
//! on `(distribution, shots, seed)`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{run_exact, Bitstring, Circuit};
use crate::error::{Error, Result};

pub type Counts = BTreeMap<Bitstring, u64>;

pub const SHARD_SHOTS: u64 = 1024;

/// Independent generator for shard `shard` of a run seeded with `seed`.
pub fn shard_rng(seed: u64, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

/// Draws `shots` samples from a finite distribution (weights need not be
/// normalized).
pub fn sample_distribution(probs: &BTreeMap<Bitstring, f64>, shots: u64, seed: u64) -> Result<Counts> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let outcomes: Vec<&Bitstring> = probs.keys().collect();
    let mut cumulative = Vec::with_capacity(outcomes.len());
    let mut acc = 0.0;
    for p in probs.values() {
        if p.is_nan() || *p < 0.0 {
            return Err(Error::InvalidArgument(format!("negative or NaN probability {p}")));
        }
        acc += p;
        cumulative.push(acc);
    }
    if acc <= 0.0 {
        return Err(Error::InvalidArgument("distribution has no weight".into()));
    }
    let total = acc;
    let shards = shots.div_ceil(SHARD_SHOTS);
    let per_shard: Vec<Vec<u64>> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let n = SHARD_SHOTS.min(shots - s * SHARD_SHOTS);
            let mut rng = shard_rng(seed, s);
            let mut local = vec![0u64; outcomes.len()];
            for _ in 0..n {
                let u: f64 = rng.gen::<f64>() * total;
                let i = cumulative.partition_point(|&c| c <= u).min(outcomes.len() - 1);
                local[i] += 1;
            }
            local
        })
        .collect();
    let mut counts = Counts::new();
    for (i, o) in outcomes.iter().enumerate() {
        let n: u64 = per_shard.iter().map(|v| v[i]).sum();
        if n > 0 {
            counts.insert((*o).clone(), n);
        }
    }
    Ok(counts)
}

/// Samples `shots` full classical registers from [`run_exact`]'s distribution.
pub fn sample_counts(c: &Circuit, shots: u64, seed: u64) -> Result<Counts> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let dist = run_exact(c)?;
    sample_distribution(&dist.outcome_probabilities(), shots, seed)
}

/// Sums counts over all bits not in `positions`.
pub fn marginal_counts(counts: &Counts, positions: &[usize]) -> Counts {
    let mut out = Counts::new();
    for (k, v) in counts {
        *out.entry(k.select(positions)).or_insert(0) += v;
    }
    out
}
