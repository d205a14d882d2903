//! Seed schedule: one 64-bit root seed fans out into independent,
//! individually addressable ChaCha8 streams.
//!
//! * Entry `(i, j)` with `i <= j` has linear index `e` in row-major order
//!   over the upper triangle. Its magnitude/value stream is `2e` and its
//!   sign stream is `2e + 1`.
//! * Derived roots (for example the X and Y matrices of an interpolation
//!   pair) are obtained with [`derive_seed`], a SplitMix64 mix of the root
//!   and a tag.
//!
//! Streams are counter-based: the value drawn from a stream depends only on
//! `(root, stream id, position)`, never on the order in which streams are
//! visited, so entries can be generated in parallel.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes `root` and `tag` into a new root seed.
pub fn derive_seed(root: u64, tag: u64) -> u64 {
    splitmix64(splitmix64(root) ^ tag.wrapping_mul(GOLDEN).rotate_left(17))
}

/// Tags for the paired matrices of an interpolation experiment.
pub mod tags {
    pub const X: u64 = 0x58;
    pub const Y: u64 = 0x59;
}

/// Factory for the per-entry streams of one root seed.
#[derive(Clone)]
pub struct StreamFactory {
    base: ChaCha8Rng,
}

impl StreamFactory {
    pub fn new(root: u64) -> Self {
        Self {
            base: ChaCha8Rng::seed_from_u64(root),
        }
    }

    /// Stream number `id`, positioned at its start.
    pub fn stream(&self, id: u64) -> Stream {
        let mut rng = self.base.clone();
        rng.set_stream(id);
        rng.set_word_pos(0);
        Stream { rng }
    }

    pub fn value_stream(&self, entry: u64) -> Stream {
        self.stream(2 * entry)
    }

    pub fn sign_stream(&self, entry: u64) -> Stream {
        self.stream(2 * entry + 1)
    }
}

/// A single random stream.
pub struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `(0, 1]` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Box-Muller pair of independent standard normals from exactly two uniforms.
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        (r * c, r * s)
    }

    pub fn normal(&mut self) -> f64 {
        self.normal_pair().0
    }

    /// Fair sign, `+1.0` or `-1.0`.
    pub fn sign(&mut self) -> f64 {
        if self.next_u64() >> 63 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Linear index of `(i, j)`, `i <= j < n`, in row-major upper-triangle order.
pub fn upper_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < n);
    i * n - i * (i + 1) / 2 + j
}
