//! Deterministic data parallelism.
//!
//! Batch work (rollouts, validation sweeps) is expressed as an order-
//! preserving map over independent items. With the `parallel` feature the
//! map fans out through rayon; without it the same code runs sequentially.
//! Every item derives its own rng stream from [`mix_seed`], so the results
//! are bit-identical no matter how many workers run or how they are
//! scheduled — the collected output order is canonical (input order), never
//! completion order.

/// Order-preserving map, parallel when the `parallel` feature is on.
#[cfg(feature = "parallel")]
pub fn map_items<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// Order-preserving map, parallel when the `parallel` feature is on.
#[cfg(not(feature = "parallel"))]
pub fn map_items<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Always-sequential map with the same contract, kept as the baseline the
/// benchmarks compare against and as a cross-check in tests.
pub fn map_items_sequential<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Stable per-item seed: a chained splitmix64 hash of the run seed and the
/// item's (step, group, member) coordinates. Unlike the standard library's
/// hashers this function is fixed for all time, which is what makes runs
/// reproducible across program invocations and platforms.
pub fn mix_seed(run_seed: u64, step: u64, group: u64, member: u64) -> u64 {
    let mut h = splitmix64(run_seed ^ 0x243F_6A88_85A3_08D3);
    h = splitmix64(h ^ step);
    h = splitmix64(h ^ group);
    h = splitmix64(h ^ member);
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

// ---------------------------------------------------------------------------
