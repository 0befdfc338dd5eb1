//! Deterministic random number streams.
//!
//! Every randomized routine in this crate draws from [`StreamRng`], a thin
//! wrapper over the ChaCha8 generator. A stream is addressed by a
//! `(seed, stream_index)` pair: the seed keys the cipher via
//! `ChaCha8Rng::seed_from_u64` and the stream index selects one of 2^64
//! non-overlapping output streams via `set_stream`. Identical pairs produce
//! identical sequences on every platform, which is what makes sharded runs
//! reproducible regardless of thread count: each shard gets its own stream
//! index and results are combined in index order.
//!
//! The derived draws are pinned down here rather than delegated to
//! distribution crates so that the byte-level output of the crate never
//! depends on another library's sampling internals:
//!
//! * `uniform_index(n)` draws an integer in `1..=n` by the widening-multiply
//!   method: take a 64-bit word `x`, form the 128-bit product `x * n`, and
//!   use its high half. A draw is rejected only when the low half falls
//!   below `2^64 mod n`, which removes the bias of the bare product.
//! * `unit_open()` maps the top 53 bits of a word to the midpoint grid
//!   `(k + 0.5) * 2^-53`, so values lie strictly inside `(0, 1)`.
//! * `exp_1()` is inversion, `-ln(unit_open())`, giving a strictly positive
//!   unit-rate exponential.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Address of a deterministic random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomStream {
    pub seed: u64,
    pub stream_index: u64,
}

impl RandomStream {
    /// Stream 0 for a seed.
    pub fn new(seed: u64) -> Self {
        RandomStream {
            seed,
            stream_index: 0,
        }
    }

    /// Same seed, absolute stream index `index`.
    pub fn with_stream(self, index: u64) -> Self {
        RandomStream {
            seed: self.seed,
            stream_index: index,
        }
    }

    /// Same seed, stream index shifted by `delta` (wrapping).
    ///
    /// Callers that fan out into sub-streams space their bases far apart;
    /// see the `STREAM_*` constants for the bases used inside this crate.
    pub fn offset(self, delta: u64) -> Self {
        RandomStream {
            seed: self.seed,
            stream_index: self.stream_index.wrapping_add(delta),
        }
    }

    /// Instantiate the generator positioned at the start of the stream.
    pub fn rng(self) -> StreamRng {
        let mut inner = ChaCha8Rng::seed_from_u64(self.seed);
        inner.set_stream(self.stream_index);
        StreamRng { inner }
    }
}

/// Stream bases used by the higher-level drivers, spaced so that the
/// per-trial offsets of different components never collide.
pub const STREAM_SPACING: u64 = 1 << 40;

/// A positioned ChaCha8 generator.
#[derive(Clone, Debug)]
pub struct StreamRng {
    inner: ChaCha8Rng,
}

impl StreamRng {
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `1..=n`, unbiased. `n` must be nonzero.
    pub fn uniform_index(&mut self, n: u64) -> u64 {
        assert!(n > 0, "uniform_index requires n >= 1");
        let mut x = self.next_u64();
        let mut m = (x as u128) * (n as u128);
        let mut low = m as u64;
        if low < n {
            // 2^64 mod n, computed without 128-bit division
            let threshold = n.wrapping_neg() % n;
            while low < threshold {
                x = self.next_u64();
                m = (x as u128) * (n as u128);
                low = m as u64;
            }
        }
        (m >> 64) as u64 + 1
    }

    /// Uniform double strictly inside (0, 1).
    pub fn unit_open(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        ((self.next_u64() >> 11) as f64 + 0.5) * SCALE
    }

    /// Unit-rate exponential, strictly positive.
    pub fn exp_1(&mut self) -> f64 {
        -self.unit_open().ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_address_same_sequence() {
        let s = RandomStream {
            seed: 42,
            stream_index: 7,
        };
        let a: Vec<u64> = {
            let mut r = s.rng();
            (0..32).map(|_| r.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut r = s.rng();
            (0..32).map(|_| r.next_u64()).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn different_streams_diverge() {
        let mut r0 = RandomStream::new(42).rng();
        let mut r1 = RandomStream::new(42).with_stream(1).rng();
        let a: Vec<u64> = (0..8).map(|_| r0.next_u64()).collect();
        let b: Vec<u64> = (0..8).map(|_| r1.next_u64()).collect();
        assert_ne!(a, b);
    }

    #[test]
    fn uniform_index_stays_in_range_and_hits_everything() {
        let mut r = RandomStream::new(1).rng();
        let mut seen = [false; 5];
        for _ in 0..1000 {
            let v = r.uniform_index(5);
            assert!((1..=5).contains(&v));
            seen[(v - 1) as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
        assert_eq!(r.uniform_index(1), 1);
    }

    #[test]
    fn uniform_index_is_balanced() {
        // coarse frequency check: 3 cells, 30k draws, ~1% tolerance at 5 sigma
        let mut r = RandomStream::new(9).rng();
        let mut counts = [0u32; 3];
        for _ in 0..30_000 {
            counts[(r.uniform_index(3) - 1) as usize] += 1;
        }
        for &c in &counts {
            assert!((9_600..=10_400).contains(&c), "counts {:?}", counts);
        }
    }

    #[test]
    fn unit_open_bounds() {
        let mut r = RandomStream::new(3).rng();
        for _ in 0..10_000 {
            let u = r.unit_open();
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn exp_1_mean_near_one() {
        let mut r = RandomStream::new(4).rng();
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| r.exp_1()).sum::<f64>() / n as f64;
        // s.e. = 1/sqrt(n) ~ 0.0032; allow 5 s.e.
        assert!((mean - 1.0).abs() < 0.016, "mean {mean}");
    }
}
