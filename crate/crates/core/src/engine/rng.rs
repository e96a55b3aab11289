//! Seeded random streams.
//!
//! Every stream is a ChaCha8 keystream keyed by the 64-bit run seed and
//! selected by a 64-bit stream id, so `(seed, stream_id)` fully determines
//! the sequence and distinct ids never share state. All derived draws
//! (uniform reals, bounded integers, Poisson counts, shuffles) are computed
//! here from raw `u64` words rather than through `rand` distributions, which
//! keeps sequences stable across `rand` releases.

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Stream used to shuffle the agent update order each tick.
pub const SCHEDULE_STREAM: u64 = 0;
/// Stream for system-level stochastic processes (arrivals, workloads).
pub const ENVIRONMENT_STREAM: u64 = 1;
/// Stream consumed while building the initial state.
pub const SETUP_STREAM: u64 = 2;
/// Agent `id` draws from stream `AGENT_STREAM_BASE + id`.
pub const AGENT_STREAM_BASE: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform real in `[0, 1)` with 53 bits of precision.
    pub fn next_uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)`. `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        // Lemire's widening-multiply rejection method.
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    /// Uniform index into a slice of length `len`.
    pub fn index(&mut self, len: usize) -> usize {
        self.below(len as u64) as usize
    }

    /// Uniform integer in the inclusive range `[lo, hi]`.
    pub fn range_inclusive(&mut self, lo: u64, hi: u64) -> u64 {
        assert!(lo <= hi);
        lo + self.below(hi - lo + 1)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_uniform() < p
    }

    /// Poisson-distributed count with mean `lambda`.
    ///
    /// Knuth's product method, applied to chunks of at most 16 so `e^-λ`
    /// never underflows; a sum of independent Poissons is Poisson.
    pub fn poisson(&mut self, lambda: f64) -> u64 {
        let mut remaining = lambda.max(0.0);
        let mut total = 0;
        while remaining > 0.0 {
            let chunk = remaining.min(16.0);
            remaining -= chunk;
            let limit = (-chunk).exp();
            let mut product = self.next_uniform();
            while product > limit {
                total += 1;
                product *= self.next_uniform();
            }
        }
        total
    }

    /// Fisher-Yates shuffle in place.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// `k` distinct indices from `[0, n)` in draw order (partial Fisher-Yates).
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n);
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.index(n - i);
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }

    fn word_pos(&self) -> u128 {
        self.inner.get_word_pos()
    }
}

impl Serialize for RngStream {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("RngStream", 3)?;
        s.serialize_field("seed", &self.seed)?;
        s.serialize_field("stream_id", &self.stream_id)?;
        s.serialize_field("word_pos", &self.word_pos().to_string())?;
        s.end()
    }
}

/// All streams belonging to one world, created on first use.
#[derive(Clone, Debug, Serialize)]
pub struct RngSet {
    seed: u64,
    streams: BTreeMap<u64, RngStream>,
}

impl RngSet {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            streams: BTreeMap::new(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&mut self, stream_id: u64) -> &mut RngStream {
        let seed = self.seed;
        self.streams
            .entry(stream_id)
            .or_insert_with(|| RngStream::new(seed, stream_id))
    }

    pub fn agent(&mut self, agent: u32) -> &mut RngStream {
        self.stream(AGENT_STREAM_BASE + agent as u64)
    }

    /// Drops an agent's stream once the agent has left the simulation.
    pub fn retire_agent(&mut self, agent: u32) {
        self.streams.remove(&(AGENT_STREAM_BASE + agent as u64));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_streams_agree() {
        let mut a = RngStream::new(42, 0);
        let mut b = RngStream::new(42, 0);
        for _ in 0..100 {
            assert_eq!(a.next_uniform().to_bits(), b.next_uniform().to_bits());
        }
    }

    #[test]
    fn distinct_stream_ids_diverge() {
        let mut a = RngStream::new(42, 0);
        let mut b = RngStream::new(42, 1);
        let same = (0..64).filter(|_| a.next_u64() == b.next_u64()).count();
        assert_eq!(same, 0);
    }

    #[test]
    fn uniform_range_and_mean() {
        let mut s = RngStream::new(7, 3);
        let mut sum = 0.0;
        for _ in 0..10_000 {
            let d = s.next_uniform();
            assert!((0.0..1.0).contains(&d));
            sum += d;
        }
        let mean = sum / 10_000.0;
        assert!((0.45..=0.55).contains(&mean), "mean {mean}");
    }

    #[test]
    fn below_stays_in_range_and_covers() {
        let mut s = RngStream::new(1, 9);
        let mut seen = [0u32; 7];
        for _ in 0..7_000 {
            seen[s.below(7) as usize] += 1;
        }
        assert!(seen.iter().all(|&c| c > 800), "{seen:?}");
    }

    #[test]
    fn poisson_mean() {
        let mut s = RngStream::new(5, 1);
        let n = 20_000;
        let total: u64 = (0..n).map(|_| s.poisson(0.5)).sum();
        let mean = total as f64 / n as f64;
        assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
        let big: u64 = (0..2_000).map(|_| s.poisson(40.0)).sum();
        let big_mean = big as f64 / 2_000.0;
        assert!((big_mean - 40.0).abs() < 0.6, "mean {big_mean}");
        assert_eq!(s.poisson(0.0), 0);
    }

    #[test]
    fn sample_indices_are_distinct() {
        let mut s = RngStream::new(11, 2);
        let mut picked = s.sample_indices(10, 10);
        picked.sort_unstable();
        assert_eq!(picked, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn serialization_tracks_position() {
        let mut a = RngStream::new(3, 4);
        let before = serde_json::to_string(&a).unwrap();
        a.next_u64();
        assert_ne!(before, serde_json::to_string(&a).unwrap());
    }
}
