//! Deterministic random streams.
//!
//! Every shard of a Monte-Carlo run draws from its own ChaCha8 stream keyed by
//! `(seed, shard index)`, so results do not depend on how shards are
//! scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Samples per shard. Part of the reproducibility contract: changing it
/// changes every Monte-Carlo estimate.
pub const SHARD_SIZE: u64 = 1 << 16;

/// Independent stream `index` of generator `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Splits `samples` into `(shard index, shard length)` pairs.
pub fn shards(samples: u64) -> Vec<(u64, u64)> {
    let full = samples / SHARD_SIZE;
    let rest = samples % SHARD_SIZE;
    let mut out: Vec<(u64, u64)> = (0..full).map(|i| (i, SHARD_SIZE)).collect();
    if rest > 0 {
        out.push((full, rest));
    }
    out
}

/// Running mean and sum of squared deviations (Welford), mergeable in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2 + other.m2 + delta * delta * self.count as f64 * other.count as f64 / count as f64;
        Moments { count, mean, m2 }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        (self.m2 / (self.count - 1) as f64 / self.count as f64).sqrt()
    }
}
