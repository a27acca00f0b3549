//! Deterministic, splittable random streams.
//!
//! A stream is identified by `(master_seed, path)`. The pair is hashed with the
//! SplitMix64 finalizer into a 256-bit ChaCha8 key, so each stream is a
//! counter-mode keystream: identical identifiers give bit-identical draws and
//! distinct paths give unrelated keys. Children are derived from the
//! identifier, not from the parent's position, which keeps results independent
//! of how work is scheduled across threads.
//!
//! Gaussian draws use the Box–Muller cosine branch on two fresh 53-bit
//! uniforms (`u1 ∈ (0, 1]`, `u2 ∈ [0, 1)`); the sine branch is discarded.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn stream_key(master_seed: u64, path: &[u64]) -> [u8; 32] {
    let mut h = splitmix64(master_seed);
    for (depth, &p) in path.iter().enumerate() {
        h = splitmix64(h ^ splitmix64(p.wrapping_add((depth as u64 + 1).wrapping_mul(GOLDEN_GAMMA))));
    }
    let mut key = [0u8; 32];
    let mut state = h;
    for chunk in key.chunks_exact_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    key
}

#[derive(Debug, Clone)]
pub struct SplitRng {
    master_seed: u64,
    stream_path: Vec<u64>,
    inner: ChaCha8Rng,
}

impl SplitRng {
    pub fn new(master_seed: u64) -> Self {
        Self::with_path(master_seed, &[])
    }

    pub fn with_path(master_seed: u64, path: &[u64]) -> Self {
        Self {
            master_seed,
            stream_path: path.to_vec(),
            inner: ChaCha8Rng::from_seed(stream_key(master_seed, path)),
        }
    }

    /// Independent stream at `path ++ [index]`.
    pub fn child(&self, index: u64) -> Self {
        let mut path = self.stream_path.clone();
        path.push(index);
        Self::with_path(self.master_seed, &path)
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_path(&self) -> &[u64] {
        &self.stream_path
    }

    /// A 64-bit seed naming this stream, usable as the master seed of a
    /// further hierarchy.
    pub fn derived_seed(&self) -> u64 {
        let key = stream_key(self.master_seed, &self.stream_path);
        u64::from_le_bytes(key[..8].try_into().unwrap())
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        assert!(lo > 0.0 && hi >= lo);
        (lo.ln() + (hi.ln() - lo.ln()) * self.uniform()).exp()
    }

    /// Uniform integer in `0..n` (rejection sampling, no modulo bias).
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }

    /// Standard normal draw (Box–Muller, cosine branch).
    pub fn gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Fisher–Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }
}
