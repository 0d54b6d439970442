//! Stochastic and exhaustive oracles for the pairing rate and the
//! distillation block statistics.
//!
//! These deliberately avoid the closed forms they validate: the pairing
//! simulation walks rounds one by one, and the block enumeration sums
//! over all bit patterns.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Error;

/// Rounds (or blocks) per RNG substream. Each chunk runs on its own
/// counter-derived stream, so serial and parallel execution produce the
/// same totals.
const CHUNK: u64 = 1 << 20;
/// Cost guard for the exhaustive block enumeration (2^b patterns).
const ENUM_MAX_B: u32 = 20;

/// A Monte Carlo estimate along with the seed and sample count that
/// produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Binomial-style standard error sqrt(m (1-m) / n).
    pub stderr: f64,
    /// Sample count behind the estimate.
    pub n: u64,
    /// Seed the run was keyed by.
    pub seed: u64,
}

impl McEstimate {
    fn from_counts(hits: u64, n: u64, seed: u64) -> Self {
        if n == 0 {
            return McEstimate {
                mean: 0.0,
                stderr: 0.0,
                n,
                seed,
            };
        }
        let mean = hits as f64 / n as f64;
        McEstimate {
            mean,
            stderr: (mean * (1.0 - mean) / n as f64).sqrt(),
            n,
            seed,
        }
    }
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Simulates the pairing discipline over `n_rounds` Bernoulli click
/// rounds and estimates pairs per round.
///
/// A click with no partner waits for the next one; if it arrives within
/// `delta` rounds they pair and the state resets, otherwise the waiting
/// click is discarded and the next click starts a new wait. Chunks are
/// simulated independently (a pair straddling a chunk boundary is lost,
/// at most one per 2^20 rounds, far below the standard error). Expects
/// p in (0, 1); intended for n_rounds of 1e5 and up.
pub fn mc_pair_rate(p: f64, delta: u64, n_rounds: u64, seed: u64) -> McEstimate {
    debug_assert!(p > 0.0 && p < 1.0);
    let chunks = n_rounds.div_ceil(CHUNK);
    let pairs: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = chunk_rng(seed, chunk);
            let len = CHUNK.min(n_rounds - chunk * CHUNK);
            let mut pairs = 0u64;
            // Rounds since the waiting click, if any. The expiry check
            // runs before the current round's draw, so a click exactly
            // delta rounds after the waiting one still pairs and a later
            // one starts fresh.
            let mut wait: Option<u64> = None;
            for _ in 0..len {
                if wait.is_some_and(|w| w >= delta) {
                    wait = None;
                }
                let click = rng.random::<f64>() < p;
                wait = match (click, wait) {
                    (true, None) => Some(0),
                    (true, Some(_)) => {
                        pairs += 1;
                        None
                    }
                    (false, Some(w)) => Some(w + 1),
                    (false, None) => None,
                };
            }
            pairs
        })
        .sum();
    McEstimate::from_counts(pairs, n_rounds, seed)
}

/// Samples `n_blocks` blocks of `b` i.i.d. error bits (1 with
/// probability `e`) and estimates the block survival probability and the
/// error rate among survivors, in that order.
///
/// A block survives when all bits agree. The second estimate is
/// conditioned on survival, so its sample count is the survivor count;
/// with no survivors it degenerates to (0, 0).
pub fn mc_ad_block(e: f64, b: u32, n_blocks: u64, seed: u64) -> (McEstimate, McEstimate) {
    debug_assert!((0.0..=1.0).contains(&e) && b >= 1);
    let chunks = n_blocks.div_ceil(CHUNK);
    let (survive, ones) = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = chunk_rng(seed, chunk);
            let len = CHUNK.min(n_blocks - chunk * CHUNK);
            let mut survive = 0u64;
            let mut ones = 0u64;
            for _ in 0..len {
                let mut n_err = 0;
                for _ in 0..b {
                    if rng.random::<f64>() < e {
                        n_err += 1;
                    }
                }
                if n_err == 0 || n_err == b {
                    survive += 1;
                    if n_err == b {
                        ones += 1;
                    }
                }
            }
            (survive, ones)
        })
        .reduce(|| (0, 0), |a, c| (a.0 + c.0, a.1 + c.1));
    (
        McEstimate::from_counts(survive, n_blocks, seed),
        McEstimate::from_counts(ones, survive, seed),
    )
}

/// Exhaustive version of the block statistics: sums the probability of
/// every b-bit error pattern and reads off P(all equal) and
/// P(all ones) / P(all equal). Rejects b above 20, where the 2^b sweep
/// stops being cheap.
pub fn enumerate_ad_block(e: f64, b: u32) -> Result<(f64, f64), Error> {
    if b < 1 {
        return Err(Error::InvalidRange {
            what: "block size must be at least 1",
        });
    }
    if b > ENUM_MAX_B {
        return Err(Error::BlockTooLarge { b, max: ENUM_MAX_B });
    }
    debug_assert!((0.0..=1.0).contains(&e));
    let mask = (1u32 << b) - 1;
    let mut q_s = 0.0;
    let mut all_ones = 0.0;
    for pattern in 0..=mask {
        let ones = pattern.count_ones();
        let prob = e.powi(ones as i32) * (1.0 - e).powi((b - ones) as i32);
        if pattern == 0 || pattern == mask {
            q_s += prob;
        }
        if pattern == mask {
            all_ones = prob;
        }
    }
    // q_s >= 2 (1/2)^b > 0 for any e in [0, 1], so the ratio is defined.
    Ok((q_s, all_ones / q_s))
}
