//! Empirical density of NS_n matrices with a large 1-block.
//!
//! Sampling: batch b uses `ChaCha8Rng::seed_from_u64(seed)` with stream b;
//! entries are drawn row-major with `gen_range(-N..=N)`. Batches have a fixed
//! size, so the result does not depend on the number of threads.

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_linalg::small;

pub const MAX_MC_N: usize = 5;
pub const MAX_MC_BOUND: i64 = 1_000_000;
const BATCH: u64 = 1 << 12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SampleClass {
    pub ns: bool,
    /// In NS_n and some n - 1 columns extend to a basis of Z^n.
    pub large_block: bool,
}

/// Classify one row-major n x n matrix.
pub fn classify_sample(n: usize, m: &[i64]) -> SampleClass {
    let primitive = (0..n).all(|j| (0..n).fold(0i64, |g, i| g.gcd(&m[i * n + j])) == 1);
    let ns = primitive && small::det(n, |i, j| m[i * n + j]).is_some_and(|d| d != 0);
    let large_block = ns
        && small::subsets(n, n - 1)
            .iter()
            .any(|cols| small::maximal_minor_gcd(n, m, cols) == Some(1));
    SampleClass { ns, large_block }
}

#[derive(Clone, Debug, Serialize)]
pub struct McReport {
    pub n: usize,
    pub bound: i64,
    pub samples: u64,
    pub seed: u64,
    pub rng: &'static str,
    pub ns_hits: u64,
    pub hits: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub ns_estimate: f64,
    pub ns_stderr: f64,
}

fn proportion(hits: u64, n: u64) -> (f64, f64) {
    let p = hits as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}

pub fn monte_carlo_tf_density(n: usize, bound: i64, samples: u64, seed: u64) -> Result<McReport> {
    if !(2..=MAX_MC_N).contains(&n) {
        return Err(Error::RangeError(format!("Monte Carlo needs 2 <= n <= {MAX_MC_N}")));
    }
    if !(1..=MAX_MC_BOUND).contains(&bound) {
        return Err(Error::RangeError(format!("entry bound must be in 1..={MAX_MC_BOUND}")));
    }
    if samples == 0 {
        return Err(Error::RangeError("need at least one sample".into()));
    }
    let batches = samples.div_ceil(BATCH);
    let (ns_hits, hits) = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = BATCH.min(samples - b * BATCH);
            let mut m = vec![0i64; n * n];
            let (mut ns, mut tf) = (0u64, 0u64);
            for _ in 0..count {
                for x in m.iter_mut() {
                    *x = rng.gen_range(-bound..=bound);
                }
                let c = classify_sample(n, &m);
                ns += c.ns as u64;
                tf += c.large_block as u64;
            }
            (ns, tf)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let (estimate, stderr) = proportion(hits, samples);
    let (ns_estimate, ns_stderr) = proportion(ns_hits, samples);
    Ok(McReport {
        n,
        bound,
        samples,
        seed,
        rng: "ChaCha8 (rand_chacha 0.3), stream = batch index",
        ns_hits,
        hits,
        estimate,
        stderr,
        ns_estimate,
        ns_stderr,
    })
}
